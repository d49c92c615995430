"""Discrete potential theory on the dyadic Bergman tree.

Nodes z(k, n) = (1 - 2^-n) e^{2 pi i k / 2^n} ordered by box containment.
Tree condenser capacity is computed two ways: an exact linear solve on
the (chain-compressed) union of source-to-target paths, and the
series-parallel conductance fold; they agree to solver tolerance.  The
comb construction and its closed form drive the union counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import geometry
from .errors import DomainError, NumericalError
from .geometry import Arc, CarlesonBox, DiscPoint

LOG2 = math.log(2.0)

# float depths underflow past this level; the embedding refuses beyond it
MAX_EMBED_LEVEL = 1000


@dataclass(frozen=True, order=True)
class TreeNode:
    """Vertex (level n, index k) with 1 <= k <= 2^n; the root is (0, 1)."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 0 or not 1 <= self.k <= 2**self.n:
            raise DomainError(f"invalid tree node (n={self.n}, k={self.k})")

    @property
    def level(self) -> int:
        return self.n

    def parent(self) -> "TreeNode":
        if self.n == 0:
            raise DomainError("the root has no parent")
        return TreeNode(self.n - 1, (self.k + 1) // 2)

    def child_plus(self) -> "TreeNode":
        return TreeNode(self.n + 1, 2 * self.k)

    def child_minus(self) -> "TreeNode":
        return TreeNode(self.n + 1, 2 * self.k - 1)

    def ancestor_at(self, level: int) -> "TreeNode":
        if not 0 <= level <= self.n:
            raise DomainError(f"no ancestor at level {level} for level-{self.n} node")
        j = self.n - level
        return TreeNode(level, ((self.k - 1) >> j) + 1)

    def is_below(self, other: "TreeNode") -> bool:
        """True iff the box of self is contained in the box of other."""
        return self.n >= other.n and self.ancestor_at(other.n) == other

    def path_to_root(self) -> list["TreeNode"]:
        node, out = self, [self]
        while node.n > 0:
            node = node.parent()
            out.append(node)
        return out

    def embed(self) -> DiscPoint:
        """The disc point (1 - 2^-n) e^{2 pi i k / 2^n}."""
        if self.n > MAX_EMBED_LEVEL:
            raise DomainError(f"level {self.n} too deep to embed in float coordinates")
        if self.n == 0:
            return geometry.ORIGIN
        frac = Fraction(self.k % (2**self.n), 2**self.n)
        return DiscPoint(2.0 * math.pi * float(frac), math.ldexp(1.0, -self.n))

    def box(self) -> CarlesonBox:
        """The structural box over the dyadic arc [(k-1)/2^n, k/2^n]."""
        center = 2.0 * math.pi * float(Fraction(2 * self.k - 1, 2 ** (self.n + 1)))
        return CarlesonBox(Arc(center, math.ldexp(1.0, -self.n)), 1.0 - math.ldexp(1.0, -self.n))

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k}


ROOT = TreeNode(0, 1)


def tree_structure(node: TreeNode) -> dict:
    return {
        "level": node.n,
        "parent": node.parent() if node.n > 0 else None,
        "children": (node.child_plus(), node.child_minus()),
        "path_to_root": node.path_to_root(),
    }


@dataclass(frozen=True)
class TreeCondenser:
    source: TreeNode
    targets: tuple

    def __post_init__(self):
        if not self.targets:
            raise DomainError("condenser needs at least one target")
        object.__setattr__(self, "targets", tuple(self.targets))
        for t in self.targets:
            if t == self.source or not t.is_below(self.source):
                raise DomainError(f"target {t} is not strictly below the source")


def _lca(a: TreeNode, b: TreeNode) -> TreeNode:
    m = min(a.n, b.n)
    a, b = a.ancestor_at(m), b.ancestor_at(m)
    # lift both until the dyadic prefixes agree; binary search on the level
    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a.ancestor_at(mid) == b.ancestor_at(mid):
            lo = mid
        else:
            hi = mid - 1
    return a.ancestor_at(lo)


def _virtual_tree(cond: TreeCondenser):
    """Chain-compressed union of source-to-target paths.

    Returns (nodes, parent_of, edge_length, target_set); interior
    degree-2 chain nodes are folded into integer edge lengths, which is
    exact for unit resistors.
    """
    src = cond.source
    targets = sorted(set(cond.targets), key=lambda t: (Fraction(t.k - 1, 2**t.n), t.n))
    keep = {src}
    keep.update(targets)
    for a, b in zip(targets, targets[1:]):
        anc = _lca(a, b)
        keep.add(anc if anc.is_below(src) else src)
    nodes = sorted(keep, key=lambda t: t.n)
    parent_of, edge_len = {}, {}
    for node in nodes:
        if node == src:
            continue
        best = None
        for other in nodes:
            if other is node or node.n <= other.n:
                continue
            if node.is_below(other) and (best is None or other.n > best.n):
                best = other
        parent_of[node] = best
        edge_len[node] = node.n - best.n
    return nodes, parent_of, edge_len, set(targets)


def tree_capacity_recursive(cond: TreeCondenser) -> float:
    """Series-parallel fold of the condenser's conductance.

    A subtree of conductance c seen across a chain of d unit edges
    contributes c/(1 + d c); sibling conductances add.
    """
    nodes, parent_of, edge_len, targets = _virtual_tree(cond)
    g: dict[TreeNode, float] = {}
    for node in sorted(nodes, key=lambda t: -t.n):
        if node == cond.source:
            continue
        if node in targets:
            sub = math.inf
        else:
            sub = sum(g.get(c, 0.0) for c in nodes if parent_of.get(c) is node)
        d = edge_len[node]
        g[node] = 1.0 / d if math.isinf(sub) else sub / (1.0 + d * sub)
    return sum(g[c] for c in nodes if parent_of.get(c) is cond.source)


def tree_capacity_exact(cond: TreeCondenser, max_dense_nodes: int = 2000) -> float:
    """Capacity via the grounded-Laplacian linear system.

    Solves the harmonic extension on the path union (full node set when
    small, chain-compressed with exact resistances otherwise) and
    returns its Dirichlet energy.
    """
    size = path_union_size(cond)
    if size <= max_dense_nodes:
        nodes, parent_of, edge_len, targets = _full_path_union(cond)
    else:
        nodes, parent_of, edge_len, targets = _virtual_tree(cond)
    idx = {node: i for i, node in enumerate(nodes)}
    n = len(nodes)
    lap = np.zeros((n, n))
    for node, par in parent_of.items():
        gcond = 1.0 / edge_len[node]
        i, j = idx[node], idx[par]
        lap[i, i] += gcond
        lap[j, j] += gcond
        lap[i, j] -= gcond
        lap[j, i] -= gcond
    fixed = np.zeros(n, dtype=bool)
    vals = np.zeros(n)
    fixed[idx[cond.source]] = True
    vals[idx[cond.source]] = 1.0
    for t in targets:
        fixed[idx[t]] = True
    free = ~fixed
    if free.any():
        a = lap[np.ix_(free, free)]
        b = -lap[np.ix_(free, fixed)] @ vals[fixed]
        try:
            vals[free] = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"tree system singular: {exc}") from exc
    energy = 0.0
    for node, par in parent_of.items():
        d = vals[idx[node]] - vals[idx[par]]
        energy += d * d / edge_len[node]
    return energy


def _full_path_union(cond: TreeCondenser):
    parent_of, edge_len = {}, {}
    keep = {cond.source}
    for t in cond.targets:
        node = t
        while node not in keep:
            keep.add(node)
            par = node.parent()
            parent_of[node] = par
            edge_len[node] = 1
            node = par
    return list(keep), parent_of, edge_len, set(cond.targets)


def path_union_size(cond: TreeCondenser) -> int:
    seen = {cond.source}
    for t in cond.targets:
        node = t
        while node not in seen:
            seen.add(node)
            node = node.parent()
    return len(seen)


# ---------------------------------------------------------------------------
# comb construction


@dataclass(frozen=True)
class CombSpec:
    """Spine of sqrt(N) sigma_+ iterates with teeth hanging N levels below."""

    anchor: TreeNode

    def __post_init__(self):
        m = math.isqrt(self.anchor.n)
        if m * m != self.anchor.n or self.anchor.n < 4:
            raise DomainError(f"anchor level must be a perfect square >= 4, got {self.anchor.n}")

    @property
    def big_n(self) -> int:
        return self.anchor.n

    @property
    def m(self) -> int:
        return math.isqrt(self.anchor.n)

    def spine(self) -> list[TreeNode]:
        out = [self.anchor]
        for _ in range(self.m):
            out.append(out[-1].child_plus())
        return out

    def teeth(self) -> list[TreeNode]:
        out = []
        for w in self.spine()[1:]:
            node = w
            for _ in range(self.big_n):
                node = node.child_minus()
            out.append(node)
        return out

    def condenser(self) -> TreeCondenser:
        return TreeCondenser(self.anchor, tuple(self.teeth()))


def default_anchor(big_n: int, angle_numerator: int = 0) -> TreeNode:
    """Anchor z(k, N) at dyadic angle angle_numerator / 2^N (0 = angle 0)."""
    k = angle_numerator % (2**big_n)
    return TreeNode(big_n, k if k >= 1 else 2**big_n)


def comb_capacity_recursive(big_n: int) -> float:
    """The scalar fold c_{i-1} = (1/N + c_i)/(1 + 1/N + c_i) down the spine."""
    m = math.isqrt(big_n)
    if m * m != big_n or big_n < 4:
        raise DomainError(f"N must be a perfect square >= 4, got {big_n}")
    c = 0.0
    for _ in range(m):
        c = (1.0 / big_n + c) / (1.0 + 1.0 / big_n + c)
    return c


def comb_capacity_closed_form(big_n: int) -> float:
    """Closed form from diagonalizing the 2x2 transfer matrix of the fold."""
    m = math.isqrt(big_n)
    if m * m != big_n or big_n < 4:
        raise DomainError(f"N must be a perfect square >= 4, got {big_n}")
    x = 1.0 / big_n
    root = math.sqrt(x * x + 4.0 * x)
    d1 = 0.5 * (-x + root)
    d2 = 0.5 * (-x - root)
    q = ((1.0 - d1) / (1.0 - d2)) ** m
    return d1 * (1.0 - q) / (1.0 - (d1 / d2) * q)


@dataclass
class SweepRow:
    big_n: int
    c0: float
    c0_sqrt_n: float
    closed_form: float
    exact_solver: float
    limit_gap: float


COMB_LIMIT = (math.e**2 - 1.0) / (math.e**2 + 1.0)


def comb_sweep(m_values, with_exact: bool = False) -> list[SweepRow]:
    rows = []
    for m in m_values:
        big_n = m * m
        c0 = comb_capacity_recursive(big_n)
        closed = comb_capacity_closed_form(big_n)
        exact = (
            tree_capacity_exact(CombSpec(default_anchor(big_n)).condenser())
            if with_exact
            else float("nan")
        )
        rows.append(SweepRow(big_n, c0, c0 * m, closed, exact, COMB_LIMIT - c0 * m))
    return rows


def comb_lower_bound_check(n_values) -> dict:
    """c0 >= 1/(10 sqrt(N)) for every perfect square in the range."""
    worst = math.inf
    records = []
    for big_n in n_values:
        m = math.isqrt(big_n)
        if m * m != big_n or big_n < 16:
            raise DomainError(f"N must be a perfect square >= 16, got {big_n}")
        val = comb_capacity_recursive(big_n) * m
        records.append({"N": big_n, "c0_sqrtN": val})
        worst = min(worst, val)
    return {"condition": "c0 >= 1/(10 sqrt(N))", "minimum": worst, "pass": worst >= 0.1, "records": records}


def tree_disc_distance_check(n_max: int = 60) -> dict:
    """(log2/2) n <= d(0, z(n,k)) <= 2n for all levels up to n_max."""
    if not 1 <= n_max <= 60:
        raise DomainError(f"n_max out of [1, 60]: {n_max}")
    records = []
    ok = True
    for n in range(1, n_max + 1):
        z = TreeNode(n, 1).embed()
        d = geometry.hyperbolic_distance(geometry.ORIGIN, z)
        lo, hi = 0.5 * LOG2 * n, 2.0 * n
        ok &= lo <= d <= hi
        records.append({"n": n, "d": d, "lower": lo, "upper": hi})
    return {"condition": "(log2/2) n <= d(0, z(n,k)) <= 2n", "pass": ok, "records": records}


# ---------------------------------------------------------------------------
# disc-side scenario


def comb_disc_sequence(spec: CombSpec, include_anchor: bool = True):
    """The comb embedded in the disc: anchor (optional) plus teeth."""
    from . import sequences

    nodes = ([spec.anchor] if include_anchor else []) + spec.teeth()
    pts = tuple(node.embed() for node in nodes)
    return sequences.Sequence(pts, f"comb(N={spec.big_n})")


@dataclass
class ScenarioReport:
    weak_separation: object
    mass_records: list
    tree_records: list
    teeth_cc: object
    passed: bool
    params: dict

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "params": self.params,
            "weak_separation": self.weak_separation.to_json(),
            "mass_records": self.mass_records,
            "tree_records": self.tree_records,
            "teeth_capacitary": self.teeth_cc.to_json(),
        }


def counterexample_scenario(
    m_list=(4, 5, 6),
    gamma: float = 0.75,
    eta: float = 0.9,
    lattice_count: int = 8,
    mass_budget: float = 64.0,
    seed: int = 0,
) -> ScenarioReport:
    """Union of a disjoint-box lattice with combs at separated anchors.

    Demonstrates the failure mechanism at desk scale: the union stays
    weakly separated and each comb carries little mass, yet the tree
    condenser capacity at every anchor violates the 1/level decay by a
    factor growing like the square root of the level.
    """
    from .errors import InputError
    from . import sequences

    combs = []
    for i, m in enumerate(m_list):
        big_n = m * m
        if math.isqrt(big_n) != m or m < 4:
            raise InputError(f"comb size must be an integer >= 4, got {m}")
        # deeper teeth would need angle increments below float resolution
        # relative to a nonzero anchor angle
        if big_n + m > 48:
            raise InputError(
                f"comb size {m} places teeth below angular float resolution; use m <= 6"
            )
        k = i * 2 ** (big_n - 2) + 1  # quadrant-separated dyadic anchors
        combs.append(CombSpec(TreeNode(big_n, k)))

    anchors = [c.anchor.embed() for c in combs]
    for i, a in enumerate(anchors):
        for b in anchors[i + 1 :]:
            if geometry.expanded_box(a, eta).intersects(geometry.expanded_box(b, eta)):
                raise InputError("anchor placement infeasible: expanded boxes overlap")

    lattice = sequences.generate("disjoint_boxes", {"count": lattice_count, "eta": eta}, seed)
    comb_seqs = [comb_disc_sequence(c) for c in combs]
    union = sequences.generate("union", {"parts": [lattice] + comb_seqs})

    ws = sequences.check_weak_separation(union, delta=0.0)

    mass_records = []
    tree_records = []
    ok = ws.params["metric_min"] > 0.0
    for c in combs:
        teeth_seq = comb_disc_sequence(c, include_anchor=False)
        d_anchor = geometry.kernel_norm_sq(c.anchor.embed())
        mass = sequences.check_finite_measure(teeth_seq)
        mass_ratio = mass * math.sqrt(d_anchor)
        mass_records.append(
            {"N": c.big_n, "mass": mass, "d_anchor": d_anchor, "ratio": mass_ratio}
        )
        ok &= mass_ratio <= mass_budget
        c0 = comb_capacity_recursive(c.big_n)
        tree_ratio = c0 * c.m  # cap * level / sqrt(level)
        tree_records.append(
            {"N": c.big_n, "cap_tau": c0, "lhs": c0 * c.big_n, "rhs": 0.1 * c.m, "ratio": tree_ratio}
        )
        ok &= tree_ratio >= 0.1

    all_teeth = sequences.generate(
        "union", {"parts": [comb_disc_sequence(c, include_anchor=False) for c in combs]}
    )
    teeth_cc = sequences.check_capacitary_condition(all_teeth, gamma)
    ok &= math.isfinite(teeth_cc.sup_ratio)

    params = {
        "m_list": list(m_list),
        "gamma": gamma,
        "eta": eta,
        "lattice_count": lattice_count,
        "mass_budget": mass_budget,
        "seed": seed,
    }
    return ScenarioReport(ws, mass_records, tree_records, teeth_cc, bool(ok), params)


def sweep_to_csv(rows: list[SweepRow], path):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "c0", "c0_sqrtN", "closed_form", "exact_solver", "limit_gap"])
        for row in rows:
            writer.writerow(
                [row.big_n, row.c0, row.c0_sqrt_n, row.closed_form, row.exact_solver, row.limit_gap]
            )
