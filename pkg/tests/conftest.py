import math

from hypothesis import HealthCheck, settings, strategies as st

from disclab.geometry import DiscPoint

settings.register_profile(
    "default",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def disc_points(min_depth=1e-6, max_depth=1.0):
    """Points with log-uniform depth, so deep configurations get exercised."""
    return st.builds(
        DiscPoint,
        st.floats(0.0, 2.0 * math.pi, exclude_max=True),
        st.floats(math.log(min_depth), math.log(max_depth)).map(math.exp),
    )


def angles():
    return st.floats(0.0, 2.0 * math.pi, exclude_max=True)


def arc_lengths(min_length=1e-6, max_length=0.5):
    return st.floats(math.log(min_length), math.log(max_length)).map(math.exp)
