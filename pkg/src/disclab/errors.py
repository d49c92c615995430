"""Exception hierarchy shared by all disclab modules."""


class DisclabError(Exception):
    pass


class DomainError(DisclabError, ValueError):
    """Mathematical precondition violated (point outside disc, bad parameter)."""


class InputError(DisclabError, ValueError):
    """Malformed user input: overlapping arcs, unparsable files, bad specs."""


class NumericalError(DisclabError, RuntimeError):
    """A solver failed: singular system, non-SPD matrix, lost accuracy."""

    def __init__(self, message, estimate=None, condition=None):
        super().__init__(message)
        self.estimate = estimate
        self.condition = condition


class ResolutionError(DisclabError, ValueError):
    """Grid too coarse to resolve a plate; message names the plate."""
