"""Capacities on the unit disc.

Two routes, kept deliberately independent:

* a fast route via discrete equilibrium measures on boundary arcs
  (first-kind log-kernel system with endpoint-clustered nodes), and
* a polar-grid Dirichlet-energy solver for condensers (5-point scheme,
  Dirichlet plates, Neumann on the circle), which serves as the oracle
  for the fast route and as the factory for W^{1,2} building blocks.

The normalization C(E) = cap_D(Delta_1(0), E) is realized by an affine
calibration of the inverse equilibrium energy against the grid solver on
single arcs (frozen constants below).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import geometry
from .errors import DomainError, NumericalError, ResolutionError
from .geometry import Arc, CarlesonBox, DiscPoint, HyperbolicDisc

# Calibration of C(E) = CAP_SCALE / (energy + CAP_SHIFT) against the grid
# value of cap_D(Delta_1(0), I) on single arcs (see scripts/calibrate.py).
# The denominator floor pins C at the grid value for the full circle so
# the formula stays positive and monotone for large arc unions.
CAP_SCALE = 2.904
CAP_SHIFT = -1.943
CAP_DEN_FLOOR = CAP_SCALE / 22.9

RIDGE_FACTOR = 1e-10


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Discrete unit-mass measure minimizing the log-kernel energy."""

    nodes: np.ndarray  # boundary angles
    weights: np.ndarray  # nonnegative, sums to 1
    energy: float


@dataclass(frozen=True)
class CondenserSpec:
    plate_inner: HyperbolicDisc
    plate_outer: list  # arcs, boxes or hyperbolic discs


@dataclass(frozen=True)
class CondenserResult:
    value: float
    warnings: tuple = ()


def _arc_nodes(arc: Arc, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature angles on one arc plus cell widths (radians).

    The t = sin^2 substitution clusters nodes at the endpoints like the
    inverse-square-root blow-up of the equilibrium density.
    """
    x = np.polynomial.legendre.leggauss(n)[0]
    tau = 0.5 * (x + 1.0)
    t = np.sin(0.5 * math.pi * tau) ** 2
    bounds = np.concatenate(([0.0], 0.5 * (t[1:] + t[:-1]), [1.0]))
    span = 2.0 * arc.half_width
    return arc.start + t * span, np.diff(bounds) * span


def _energy_matrix(angles: np.ndarray, widths: np.ndarray) -> np.ndarray:
    d = np.abs(np.sin(0.5 * (angles[:, None] - angles[None, :])))
    with np.errstate(divide="ignore"):
        k = np.log(2.0) - np.log(2.0 * d)
    np.fill_diagonal(k, np.log(2.0 / widths) + 1.5)
    return k


def equilibrium_measure(arcs: list[Arc], quad_nodes_per_arc: int = 24) -> EquilibriumMeasure:
    """Equilibrium measure of a finite union of disjoint arcs.

    Solves the first-kind system for a unit-mass measure with constant
    potential on the arcs, with a small ridge, then enforces
    nonnegativity by an active-set sweep.
    """
    if quad_nodes_per_arc < 8:
        raise DomainError(f"need >= 8 nodes per arc, got {quad_nodes_per_arc}")
    arcs = geometry.merge_arcs(list(arcs))
    if not arcs:
        raise DomainError("empty arc family")
    parts = [_arc_nodes(a, quad_nodes_per_arc) for a in arcs]
    # arcs shorter than the float resolution of absolute angles collapse
    # to one node carrying the whole width; the point-mass energy
    # log(2/width) is then the right self-interaction
    parts = [
        (np.array([a.center_angle]), np.array([2.0 * a.half_width])) if a.length < 1e-12 else p
        for a, p in zip(arcs, parts)
    ]
    angles = np.concatenate([p[0] for p in parts])
    widths = np.concatenate([p[1] for p in parts])
    k = _energy_matrix(angles, widths)
    n = len(angles)
    k_reg = k + (RIDGE_FACTOR * np.trace(k) / n) * np.eye(n)

    active = np.ones(n, dtype=bool)
    w = np.zeros(n)
    for _ in range(25):
        idx = np.where(active)[0]
        m = len(idx)
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = k_reg[np.ix_(idx, idx)]
        kkt[:m, m] = 1.0
        kkt[m, :m] = 1.0
        rhs = np.zeros(m + 1)
        rhs[m] = 1.0
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"equilibrium system singular: {exc}",
                condition=float(np.linalg.cond(k_reg)),
            ) from exc
        w = np.zeros(n)
        w[idx] = sol[:m]
        neg = w < -1e-12
        if not neg.any():
            break
        active &= ~neg
    w = np.maximum(w, 0.0)
    total = w.sum()
    if not math.isfinite(total) or total <= 0:
        raise NumericalError(
            "equilibrium weights degenerate", condition=float(np.linalg.cond(k_reg))
        )
    w /= total
    energy = float(w @ k @ w)
    if not math.isfinite(energy) or energy <= 0:
        raise NumericalError(f"nonpositive equilibrium energy {energy}")
    return EquilibriumMeasure(angles, w, energy)


def log_capacity(arcs: list[Arc], quad_nodes_per_arc: int = 24) -> float:
    """C(E) = cap_D(Delta_1(0), E) for a finite union of arcs; 0 if empty."""
    arcs = geometry.merge_arcs(list(arcs))
    if not arcs:
        return 0.0
    mu = equilibrium_measure(arcs, quad_nodes_per_arc)
    return CAP_SCALE / max(mu.energy + CAP_SHIFT, CAP_DEN_FLOOR)


def _target_to_arc_and_clearance(z: DiscPoint, target) -> tuple[Arc | None, bool, bool]:
    """(image arc, plates_touch, precondition_ok) for one outer-plate item."""
    if isinstance(target, DiscPoint):
        if geometry.hyperbolic_distance(z, target) <= 2.0:
            return None, True, True
        ok = target.depth <= z.depth / 2.0
        return geometry.boundary_arc(geometry.mobius(z, target)), False, ok
    if isinstance(target, HyperbolicDisc):
        touch = geometry.hyperbolic_distance(z, target.center) <= 1.0 + target.radius
        if touch:
            return None, True, True
        ok = target.center.depth <= z.depth / 2.0
        return geometry.boundary_arc(geometry.mobius(z, target.center)), False, ok
    if isinstance(target, CarlesonBox):
        c, rad = geometry.unit_hyperbolic_disc(z).euclidean()
        ts = np.linspace(0.0, 2.0 * math.pi, 128, endpoint=False)
        ring = c + rad * np.exp(1j * ts)
        for wpt in ring:
            r_w = abs(wpt)
            if r_w >= target.inner_radius and target.base_arc.contains_angle(
                float(np.angle(wpt))
            ):
                return None, True, True
        depth_b = target.base_arc.length
        w = DiscPoint(target.base_arc.center_angle, depth_b)
        ok = depth_b <= z.depth / 2.0
        return geometry.boundary_arc(geometry.mobius(z, w)), False, ok
    if isinstance(target, Arc):
        return geometry.arc_mobius_image(z, target), False, True
    raise DomainError(f"unsupported target type: {type(target).__name__}")


def condenser_capacity(z: DiscPoint, targets: list, quad_nodes_per_arc: int = 24) -> CondenserResult:
    """cap_D(Delta_1(z), targets) via Mobius transfer to arcs at the origin.

    Boxes and discs are reduced to the arcs of representative points; the
    reduction is a comparability, so a violated depth precondition is
    reported as a warning, not an error.  Plates that touch Delta_1(z)
    give capacity 0 by convention.
    """
    if not targets:
        raise DomainError("empty target list")
    arcs = []
    warnings = []
    for t in targets:
        arc, touch, ok = _target_to_arc_and_clearance(z, t)
        if touch:
            return CondenserResult(0.0, ("plates intersect; capacity 0 by convention",))
        if not ok:
            warnings.append("target depth exceeds half the base depth; comparability not guaranteed")
        arcs.append(arc)
    value = log_capacity(arcs, quad_nodes_per_arc)
    return CondenserResult(value, tuple(dict.fromkeys(warnings)))


# ---------------------------------------------------------------------------
# polar grid solver


class PolarGrid:
    """Node-centered polar grid on the closed disc with a center node.

    Ring radii are graded geometrically toward the circle; the last ring
    sits at r = 1 so boundary arcs can carry Dirichlet data while the
    rest of the circle is naturally Neumann.
    """

    def __init__(self, n_r: int, n_t: int, min_depth: float = 1e-3):
        if n_r < 4 or n_t < 8:
            raise DomainError(f"grid too small: {n_r}x{n_t}")
        if not (0.0 < min_depth <= 0.5):
            raise DomainError(f"min_depth out of (0, 0.5]: {min_depth}")
        self.n_r = n_r
        self.n_t = n_t
        self.min_depth = min_depth
        k = np.arange(0, n_r + 1)
        radii = 1.0 - min_depth ** (k / n_r)  # radii[0] = 0 (center)
        self.ring_r = np.concatenate([radii[1:], [1.0]])  # rings 1..K
        self.n_rings = len(self.ring_r)
        self.dtheta = 2.0 * math.pi / n_t
        self.thetas = np.arange(n_t) * self.dtheta
        self.n_nodes = 1 + self.n_rings * n_t
        self._build_edges()
        # flat node coordinates for rasterization
        self.node_r = np.concatenate([[0.0], np.repeat(self.ring_r, n_t)])
        self.node_t = np.concatenate([[0.0], np.tile(self.thetas, self.n_rings)])

    def node_index(self, ring: int, j: int) -> int:
        """ring 0 is the center; rings 1..n_rings carry n_t nodes each."""
        if ring == 0:
            return 0
        return 1 + (ring - 1) * self.n_t + (j % self.n_t)

    def _build_edges(self):
        nt, dt = self.n_t, self.dtheta
        r = self.ring_r
        rows_a, rows_b, gs = [], [], []
        # center to first ring
        first = 1 + np.arange(nt)
        rows_a.append(np.zeros(nt, dtype=int))
        rows_b.append(first)
        gs.append(np.full(nt, 0.5 * dt))
        # radial edges ring k -> k+1
        for k in range(self.n_rings - 1):
            a = 1 + k * nt + np.arange(nt)
            face = 0.5 * (r[k] + r[k + 1])
            g = face * dt / (r[k + 1] - r[k])
            rows_a.append(a)
            rows_b.append(a + nt)
            gs.append(np.full(nt, g))
        # angular edges within each ring
        widths = np.empty(self.n_rings)
        prev = np.concatenate([[0.0], r[:-1]])
        nxt = np.concatenate([r[1:], [1.0]])
        widths = 0.5 * (nxt - prev)
        widths[-1] = 0.5 * (1.0 - r[-2])
        for k in range(self.n_rings):
            a = 1 + k * nt + np.arange(nt)
            b = 1 + k * nt + (np.arange(nt) + 1) % nt
            g = widths[k] / (r[k] * dt)
            rows_a.append(a)
            rows_b.append(b)
            gs.append(np.full(nt, g))
        self.edge_a = np.concatenate(rows_a)
        self.edge_b = np.concatenate(rows_b)
        self.edge_g = np.concatenate(gs)
        self.cell_widths = widths
        n = self.n_nodes
        i = np.concatenate([self.edge_a, self.edge_b, self.edge_a, self.edge_b])
        j = np.concatenate([self.edge_b, self.edge_a, self.edge_a, self.edge_b])
        v = np.concatenate([-self.edge_g, -self.edge_g, self.edge_g, self.edge_g])
        self.laplacian = scipy.sparse.coo_matrix((v, (i, j)), shape=(n, n)).tocsr()

    def node_areas(self) -> np.ndarray:
        """Control areas (plain dxdy measure) for L2 norms."""
        areas = np.empty(self.n_nodes)
        areas[0] = math.pi * (0.5 * self.ring_r[0]) ** 2
        ring_area = self.cell_widths * self.ring_r * self.dtheta
        areas[1:] = np.repeat(ring_area, self.n_t)
        return areas

    def rasterize(self, plate, name: str = "plate", min_cells: int = 4) -> np.ndarray:
        mask = np.zeros(self.n_nodes, dtype=bool)
        if isinstance(plate, HyperbolicDisc):
            c, rad = plate.euclidean()
            zs = self.node_r * np.exp(1j * self.node_t)
            mask = np.abs(zs - c) <= rad
        elif isinstance(plate, CarlesonBox):
            ang = _angles_in_arc(self.node_t, plate.base_arc)
            mask = (self.node_r >= plate.inner_radius - 1e-15) & ang
            mask[0] = plate.inner_radius == 0.0
        elif isinstance(plate, Arc):
            boundary = self.node_r >= 1.0 - 1e-15
            mask = boundary & _angles_in_arc(self.node_t, plate)
        else:
            raise DomainError(f"unsupported plate type: {type(plate).__name__}")
        if mask.sum() < min_cells:
            raise ResolutionError(
                f"{name} covers only {int(mask.sum())} grid cells (< {min_cells}); refine the grid"
            )
        return mask

    def solve(self, mask0: np.ndarray, mask1: np.ndarray) -> tuple[np.ndarray, float]:
        """Harmonic values with u=0 on mask0, u=1 on mask1; returns (u, energy)."""
        if (mask0 & mask1).any():
            return np.zeros(self.n_nodes), 0.0
        u = np.zeros(self.n_nodes)
        u[mask1] = 1.0
        fixed = mask0 | mask1
        free = ~fixed
        if free.any():
            lap = self.laplacian
            rhs = -(lap[free][:, fixed] @ u[fixed])
            sol = scipy.sparse.linalg.spsolve(lap[free][:, free].tocsc(), rhs)
            u[free] = sol
        return u, self.energy_of(u)

    def energy_of(self, u: np.ndarray) -> float:
        d = u[self.edge_a] - u[self.edge_b]
        return float(np.sum(self.edge_g * d * d))

    def l2_norm_sq(self, u: np.ndarray) -> float:
        return float(np.sum(self.node_areas() * u * u))


def _angles_in_arc(thetas: np.ndarray, arc: Arc) -> np.ndarray:
    if arc.is_full_circle():
        return np.ones_like(thetas, dtype=bool)
    d = np.mod(thetas - arc.center_angle + math.pi, 2.0 * math.pi) - math.pi
    return np.abs(d) <= arc.half_width * (1 + 1e-15)


@dataclass
class GridPotential:
    """Discrete equilibrium potential; values indexed like the grid's nodes."""

    grid: PolarGrid
    values: np.ndarray
    energy: float

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.grid.n_r, self.grid.n_t)

    def to_csv(self, path):
        rows = np.column_stack([self.grid.node_r, self.grid.node_t, self.values])
        np.savetxt(path, rows, delimiter=",", header="r,theta,value", comments="")


def _plate_min_depth(spec: CondenserSpec) -> float:
    depths = []
    c, rad = spec.plate_inner.euclidean()
    depths.append(max(1.0 - (abs(c) + rad), 1e-6))
    for t in spec.plate_outer:
        if isinstance(t, Arc):
            depths.append(max(t.length / 4.0, 1e-6))
        elif isinstance(t, CarlesonBox):
            depths.append(max(1.0 - t.inner_radius, 1e-6))
        elif isinstance(t, HyperbolicDisc):
            ci, ri = t.euclidean()
            depths.append(max(1.0 - (abs(ci) + ri), 1e-6))
        else:
            raise DomainError(f"unsupported plate type: {type(t).__name__}")
    return min(0.5, min(depths) / 8.0)


def grid_condenser_capacity(spec: CondenserSpec, resolution: tuple[int, int] = (96, 256)) -> GridPotential:
    """Energy-minimizing grid potential for a condenser; energy ~ capacity."""
    n_r, n_t = resolution
    grid = PolarGrid(n_r, n_t, _plate_min_depth(spec))
    mask0 = grid.rasterize(spec.plate_inner, "inner plate")
    mask1 = np.zeros(grid.n_nodes, dtype=bool)
    for i, t in enumerate(spec.plate_outer):
        mask1 |= grid.rasterize(t, f"outer plate #{i}")
    u, energy = grid.solve(mask0, mask1)
    return GridPotential(grid, u, energy)


def capacity_upper_bound(u: GridPotential, a: float, b: float) -> float:
    """Lemma-style bound energy(u)/(b-a)^2 from a merely admissible function."""
    if a >= b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    return u.energy / (b - a) ** 2


def three_condenser_capacities(
    z: DiscPoint, points: list, resolution: tuple[int, int] = (128, 256)
) -> tuple[float, float, float]:
    """Grid capacities from Delta_1(z) to the boxes, unit discs, and arcs
    of the given points.

    The three outer plates are comparable condenser targets; their
    capacities agree up to absolute constants when every point is at
    most half as deep as z.
    """
    inner = geometry.unit_hyperbolic_disc(z)
    plate_sets = (
        [geometry.carleson_box(p) for p in points],
        [geometry.unit_hyperbolic_disc(p) for p in points],
        [geometry.boundary_arc(p) for p in points],
    )
    return tuple(
        grid_condenser_capacity(CondenserSpec(inner, plates), resolution).energy
        for plates in plate_sets
    )
