"""Exact formulas of the unit disc.

Mobius automorphisms, the Dirichlet reproducing kernel and its induced
metric, hyperbolic distance, boundary arcs, Carleson boxes and harmonic
measure.  Everything here is a pure function of its inputs.

Points are stored as (theta, depth) with depth = 1 - |z|.  This keeps
points that are exponentially close to the boundary (depth ~ 2^-800)
representable, which cartesian coordinates cannot do; all pairwise
formulas route through a cancellation-free evaluation of 1 - w*conj(z).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, InputError

TWO_PI = 2.0 * math.pi

# |w*conj(z)| below which the kernel power series replaces the log formula
_KERNEL_SERIES_CUTOFF = 1e-4


def _wrap_angle(t: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    t = math.fmod(t, TWO_PI)
    return t + TWO_PI if t < 0 else t


def _signed_angle(t: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    t = math.fmod(t, TWO_PI)
    if t > math.pi:
        t -= TWO_PI
    elif t <= -math.pi:
        t += TWO_PI
    return t


@dataclass(frozen=True)
class DiscPoint:
    """A point of the open unit disc, stored as angle and boundary depth.

    depth = 1 - |z| must lie in (0, 1]; depth == 1 is the origin.
    """

    theta: float
    depth: float

    def __post_init__(self):
        if not (0.0 < self.depth <= 1.0) or not math.isfinite(self.theta):
            raise DomainError(f"point not in open disc: theta={self.theta}, depth={self.depth}")
        object.__setattr__(self, "theta", _wrap_angle(self.theta))

    @classmethod
    def from_xy(cls, re: float, im: float) -> "DiscPoint":
        rsq = re * re + im * im
        if rsq >= 1.0:
            raise DomainError(f"point on or outside the unit circle: {re}+{im}j")
        r = math.sqrt(rsq)
        return cls(math.atan2(im, re) if r > 0 else 0.0, 1.0 - r)

    @classmethod
    def from_polar(cls, r: float, theta: float) -> "DiscPoint":
        if not (0.0 <= r < 1.0):
            raise DomainError(f"radius out of [0,1): {r}")
        return cls(theta if r > 0 else 0.0, 1.0 - r)

    @classmethod
    def from_complex(cls, z: complex) -> "DiscPoint":
        return cls.from_xy(z.real, z.imag)

    @property
    def r(self) -> float:
        return 1.0 - self.depth

    @property
    def re(self) -> float:
        return self.r * math.cos(self.theta)

    @property
    def im(self) -> float:
        return self.r * math.sin(self.theta)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    def is_origin(self) -> bool:
        return self.depth == 1.0


ORIGIN = DiscPoint(0.0, 1.0)


def point_to_json(p: DiscPoint) -> dict:
    return {"r": p.r, "theta": p.theta}


def point_from_json(d: dict) -> DiscPoint:
    if "re" in d and "im" in d:
        return DiscPoint.from_xy(float(d["re"]), float(d["im"]))
    if "depth" in d:
        return DiscPoint(float(d.get("theta", 0.0)), float(d["depth"]))
    if "r" in d and "theta" in d:
        return DiscPoint.from_polar(float(d["r"]), float(d["theta"]))
    raise InputError(f"cannot parse point: {d!r}")


def one_minus_conj_prod(z: DiscPoint, w: DiscPoint) -> complex:
    """1 - conj(z)*w, evaluated without cancellation.

    conj(z)*w = (1-s_z)(1-s_w) e^{i(tw-tz)}; splitting off 1 - e^{i*delta}
    = -2i sin(delta/2) e^{i*delta/2} keeps full accuracy when both points
    are deep and nearly aligned.
    """
    delta = w.theta - z.theta
    s = z.depth + w.depth - z.depth * w.depth
    half = cmath.exp(0.5j * delta)
    return -2j * math.sin(0.5 * delta) * half + s * half * half


def _diff(z: DiscPoint, w: DiscPoint) -> complex:
    """z - w as a complex number, stable for deep nearly-aligned points."""
    half = cmath.exp(0.5j * (z.theta + w.theta))
    rot = 2j * math.sin(0.5 * (z.theta - w.theta)) * half
    return rot + w.depth * cmath.exp(1j * w.theta) - z.depth * cmath.exp(1j * z.theta)


def mobius(z: DiscPoint, w: DiscPoint) -> DiscPoint:
    """The disc automorphism phi_z(w) = (z - w)/(1 - conj(z) w).

    Exchanges z and the origin, and is an involution in w.
    """
    num = _diff(z, w)
    den = one_minus_conj_prod(z, w)
    rho = abs(num) / abs(den)
    if rho < 0.5:
        # the quotient keeps full relative accuracy near the origin
        if rho == 0.0:
            return ORIGIN
        return DiscPoint(cmath.phase(num / den), 1.0 - rho)
    # 1 - |phi|^2 = (1-|z|^2)(1-|w|^2)/|den|^2, cancellation-free near the
    # circle; divide factor by factor so extreme depths do not underflow
    a = abs(den)
    t = (z.depth * (2.0 - z.depth) / a) * (w.depth * (2.0 - w.depth) / a)
    # beyond float range the result is pinned to the deepest representable point
    t = min(max(t, 5e-324), 1.0)
    depth = t / (1.0 + math.sqrt(1.0 - t))
    return DiscPoint(cmath.phase(num / den), depth)


def kernel(w: DiscPoint, z: DiscPoint) -> complex:
    """Dirichlet reproducing kernel k(w, z) = log(1/(1 - w conj(z)))/(w conj(z)).

    Hermitian: kernel(w, z) == conj(kernel(z, w)).  Equals 1 when the
    product w*conj(z) vanishes (power-series limit).
    """
    q = (1.0 - w.depth) * (1.0 - z.depth) * cmath.exp(1j * (w.theta - z.theta))
    if abs(q) < _KERNEL_SERIES_CUTOFF:
        # sum q^n/(n+1); |q|<1e-4 makes 4 terms exact to machine precision
        return 1.0 + q * (0.5 + q * (1.0 / 3.0 + q * 0.25))
    one_minus_q = one_minus_conj_prod(z, w)
    return -cmath.log(one_minus_q) / q


def kernel_norm_sq(z: DiscPoint) -> float:
    """d(z) = ||k_z||^2 = log(1/(1-|z|^2))/|z|^2; equals 1 at the origin."""
    s = z.depth
    x = (1.0 - s) ** 2  # |z|^2
    if x < _KERNEL_SERIES_CUTOFF:
        return 1.0 + x * (0.5 + x * (1.0 / 3.0 + x * 0.25))
    # 1 - x = s(2-s), evaluated in log form so depths ~1e-300 survive
    return -(math.log(s) + math.log(2.0 - s)) / x


def dirichlet_metric(z: DiscPoint, w: DiscPoint) -> float:
    """d_D(z,w) = sqrt(1 - |<k_z,k_w>|^2 / (||k_z||^2 ||k_w||^2)), in [0, 1)."""
    if z == w:
        return 0.0
    g = abs(kernel(z, w)) ** 2 / (kernel_norm_sq(z) * kernel_norm_sq(w))
    return math.sqrt(max(0.0, 1.0 - min(g, 1.0)))


def hyperbolic_distance(z: DiscPoint, w: DiscPoint) -> float:
    """Hyperbolic distance with d(z,w) = (1/2) log((1+rho)/(1-rho)), rho=|phi_z(w)|."""
    m = mobius(z, w)
    return 0.5 * math.log((2.0 - m.depth) / m.depth)


@dataclass(frozen=True)
class Arc:
    """Closed boundary arc; length is a fraction of the circle (|T| = 1)."""

    center_angle: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= 1.0):
            raise DomainError(f"arc length out of (0,1]: {self.length}")
        object.__setattr__(self, "center_angle", _wrap_angle(self.center_angle))

    @property
    def half_width(self) -> float:
        """Half the angular extent, in radians."""
        return math.pi * self.length

    @property
    def start(self) -> float:
        return self.center_angle - self.half_width

    @property
    def end(self) -> float:
        return self.center_angle + self.half_width

    def is_full_circle(self) -> bool:
        return self.length >= 1.0

    def contains_angle(self, t: float) -> bool:
        if self.is_full_circle():
            return True
        # absolute slack covers rounding of endpoint angles near magnitude 2*pi
        return abs(_signed_angle(t - self.center_angle)) <= self.half_width * (1 + 1e-15) + 1e-14

    def intersects(self, other: "Arc") -> bool:
        if self.is_full_circle() or other.is_full_circle():
            return True
        gap = abs(_signed_angle(other.center_angle - self.center_angle))
        return gap <= self.half_width + other.half_width

    def contains_arc(self, other: "Arc") -> bool:
        if self.is_full_circle():
            return True
        if other.is_full_circle():
            return False
        gap = abs(_signed_angle(other.center_angle - self.center_angle))
        return gap + other.half_width <= self.half_width * (1 + 1e-12) + 1e-14

    def to_json(self) -> dict:
        return {"center_angle": self.center_angle, "length": self.length}


def arc_from_json(d: dict) -> Arc:
    return Arc(float(d["center_angle"]), float(d["length"]))


def arc_from_endpoints(start: float, end: float) -> Arc:
    """Arc traversed counterclockwise from angle start to angle end."""
    span = _wrap_angle(end - start)
    if span == 0.0:
        span = TWO_PI
    return Arc(start + 0.5 * span, span / TWO_PI)


def merge_arcs(arcs: list[Arc]) -> list[Arc]:
    """Union of closed arcs as a list of disjoint arcs."""
    if not arcs:
        return []
    merged = _merge_intervals(arcs)
    while True:  # hulls can create fresh overlaps; iterate to a fixpoint
        again = _merge_intervals(merged)
        if len(again) == len(merged):
            break
        merged = again
    if len(merged) == 1 and merged[0].length >= 1.0 - 1e-12:
        return [Arc(0.0, 1.0)]
    return merged


def _merge_intervals(arcs: list[Arc]) -> list[Arc]:
    """Merge by transitive overlap; singleton groups pass through untouched.

    Groups are hulled in coordinates relative to a member arc, so very
    short arcs (lengths far below the float resolution of absolute
    angles) survive with their lengths intact.
    """
    if any(a.is_full_circle() for a in arcs):
        return [Arc(0.0, 1.0)]
    n = len(arcs)
    group = list(range(n))

    def find(i):
        while group[i] != i:
            group[i] = group[group[i]]
            i = group[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if arcs[i].intersects(arcs[j]):
                group[find(i)] = find(j)
    clusters: dict[int, list[Arc]] = {}
    for i, a in enumerate(arcs):
        clusters.setdefault(find(i), []).append(a)
    out = []
    for members in clusters.values():
        if len(members) == 1:
            out.append(members[0])
            continue
        ref = members[0].center_angle
        lo = min(_signed_angle(a.center_angle - ref) - a.half_width for a in members)
        hi = max(_signed_angle(a.center_angle - ref) + a.half_width for a in members)
        if hi - lo >= TWO_PI:
            return [Arc(0.0, 1.0)]
        out.append(Arc(ref + 0.5 * (lo + hi), (hi - lo) / TWO_PI))
    return sorted(out, key=lambda a: a.center_angle)


def boundary_arc(z: DiscPoint) -> Arc:
    """I_z: the arc centered at the radial projection z/|z| of length 1-|z|."""
    if z.is_origin():
        raise DomainError("boundary_arc undefined at the origin")
    return Arc(z.theta, z.depth)


def arc_transform(arc: Arc, eta: float, big_k: float) -> Arc:
    """K * I^eta: cocentric arc of length min(1, K*|I|^eta)."""
    if not (0.0 < eta <= 1.0):
        raise DomainError(f"eta out of (0,1]: {eta}")
    if big_k < 1.0:
        raise DomainError(f"K must be >= 1: {big_k}")
    return Arc(arc.center_angle, min(1.0, big_k * arc.length**eta))


def _boundary_mobius_angle(z: DiscPoint, t: float) -> float:
    """Angle of phi_z(e^{it}); the boundary maps to itself."""
    zeta = cmath.exp(1j * t)
    num = z.z - zeta
    den = 1.0 - z.z.conjugate() * zeta
    return cmath.phase(num / den)


def arc_mobius_image(z: DiscPoint, arc: Arc) -> Arc:
    """Image of a boundary arc under phi_z (an arc again, orientation kept)."""
    if arc.is_full_circle():
        return Arc(0.0, 1.0)
    a = _boundary_mobius_angle(z, arc.start)
    b = _boundary_mobius_angle(z, arc.end)
    return arc_from_endpoints(a, b)


@dataclass(frozen=True)
class CarlesonBox:
    """Box {r e^{it} : inner_radius <= r < 1, e^{it} in base_arc}."""

    base_arc: Arc
    inner_radius: float

    def __post_init__(self):
        # inner_radius 1.0 is allowed: boxes of very deep points round to it
        if not (0.0 <= self.inner_radius <= 1.0):
            raise DomainError(f"inner radius out of [0,1]: {self.inner_radius}")

    def contains_point(self, p: DiscPoint) -> bool:
        return p.r >= self.inner_radius and self.base_arc.contains_angle(p.theta)

    def intersects(self, other: "CarlesonBox") -> bool:
        # both boxes reach the circle, so arc overlap is enough
        return self.base_arc.intersects(other.base_arc)

    def contains_box(self, other: "CarlesonBox") -> bool:
        return (
            self.base_arc.contains_arc(other.base_arc)
            and self.inner_radius <= other.inner_radius * (1 + 1e-12)
        )


def carleson_box(z: DiscPoint) -> CarlesonBox:
    """S(z): the box over I_z with inner radius |z|."""
    return CarlesonBox(boundary_arc(z), 1.0 - z.depth)


def expanded_box(z: DiscPoint, eta: float) -> CarlesonBox:
    """S^eta(z) = S(z* (1 - (1-|z|)^eta)): depth (1-|z|)^eta over the same center."""
    if not (0.0 < eta < 1.0):
        raise DomainError(f"eta out of (0,1): {eta}")
    if z.is_origin():
        raise DomainError("expanded box undefined at the origin")
    d = z.depth**eta
    if d >= 1.0:
        return CarlesonBox(Arc(z.theta, 1.0), 0.0)
    return CarlesonBox(Arc(z.theta, d), 1.0 - d)


@dataclass(frozen=True)
class HyperbolicDisc:
    """Hyperbolic disc Delta_r(center); radius in the hyperbolic metric."""

    center: DiscPoint
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError(f"hyperbolic radius must be > 0: {self.radius}")

    def euclidean(self) -> tuple[complex, float]:
        """(center, radius) of the Euclidean disc this set equals."""
        rho = math.tanh(self.radius)
        z = self.center.z
        a2 = abs(z) ** 2
        den = 1.0 - rho * rho * a2
        return z * (1.0 - rho * rho) / den, rho * (1.0 - a2) / den

    def contains_complex(self, w: complex) -> bool:
        c, rad = self.euclidean()
        return abs(w - c) <= rad

    def contains_point(self, p: DiscPoint) -> bool:
        return hyperbolic_distance(self.center, p) <= self.radius


def unit_hyperbolic_disc(z: DiscPoint) -> HyperbolicDisc:
    """Delta_1(z), the default plate around a point."""
    return HyperbolicDisc(z, 1.0)


def _poisson_antiderivative(r: float, s: float) -> float:
    """Continuous antiderivative of the Poisson kernel (1-r^2)/|1-r e^{is}|^2.

    H(s) = s - 2 arg(1 - r e^{is}); the argument stays in (-pi/2, pi/2)
    because Re(1 - r e^{is}) >= 1-r > 0, so no branch surgery is needed.
    """
    return s + 2.0 * math.atan2(r * math.sin(s), 1.0 - r * math.cos(s))


def harmonic_measure(z: DiscPoint, arcs: list[Arc] | Arc) -> float:
    """omega(z, union of arcs, D): Poisson integral of the arc indicator at z.

    Additive over the (required pairwise disjoint) arcs; equals the total
    arc length at z = 0 and 1 for the full circle.
    """
    if isinstance(arcs, Arc):
        arcs = [arcs]
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            gap = abs(_signed_angle(arcs[j].center_angle - arcs[i].center_angle))
            if gap < arcs[i].half_width + arcs[j].half_width - 1e-14:
                raise InputError(f"overlapping arcs: {arcs[i]} and {arcs[j]}")
    r = 1.0 - z.depth
    total = 0.0
    for arc in arcs:
        if arc.is_full_circle():
            total += 1.0
            continue
        a = arc.start - z.theta
        b = arc.end - z.theta
        # shift by whole turns so the interval sits inside one period
        a = _signed_angle(a)
        b = a + 2.0 * arc.half_width
        total += (_poisson_antiderivative(r, b) - _poisson_antiderivative(r, a)) / TWO_PI
    return min(total, 1.0)
