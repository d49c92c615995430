import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import arc_lengths, angles, disc_points
from disclab import geometry
from disclab.errors import DomainError, InputError
from disclab.geometry import ORIGIN, Arc, CarlesonBox, DiscPoint
from disclab.numerics import adaptive_integrate


class TestDiscPoint:
    def test_constructors_agree(self):
        p = DiscPoint.from_xy(0.3, 0.4)
        q = DiscPoint.from_polar(0.5, math.atan2(0.4, 0.3))
        assert p.r == pytest.approx(q.r)
        assert p.theta == pytest.approx(q.theta)

    def test_outside_disc_rejected(self):
        with pytest.raises(DomainError):
            DiscPoint.from_xy(1.0, 0.0)
        with pytest.raises(DomainError):
            DiscPoint.from_polar(1.2, 0.0)

    @given(disc_points())
    def test_json_roundtrip(self, p):
        q = geometry.point_from_json(geometry.point_to_json(p))
        # the origin forgets its angle; elsewhere the roundtrip is faithful
        if not p.is_origin():
            assert q.theta == pytest.approx(p.theta, abs=1e-15)
        assert q.depth == pytest.approx(p.depth, rel=1e-12)

    def test_json_accepts_xy_form(self):
        p = geometry.point_from_json({"re": 0.3, "im": 0.4})
        assert p.r == pytest.approx(0.5)


class TestMobius:
    def test_hand_value(self):
        z = DiscPoint.from_xy(0.5, 0.0)
        w = DiscPoint.from_xy(0.25, 0.0)
        assert geometry.mobius(z, w).z == pytest.approx(0.25 / 0.875)

    @given(disc_points(min_depth=1e-2), disc_points(min_depth=1e-2))
    def test_involution(self, z, w):
        back = geometry.mobius(z, geometry.mobius(z, w))
        assert abs(back.z - w.z) < 1e-12

    @given(disc_points(min_depth=1e-6), disc_points(min_depth=1e-6))
    def test_involution_deep(self, z, w):
        # the map's derivative grows like 1/depth near the circle
        back = geometry.mobius(z, geometry.mobius(z, w))
        assert abs(back.z - w.z) < 1e-12 / min(z.depth, w.depth, 0.5)

    @given(disc_points())
    def test_fixed_points(self, z):
        assert geometry.mobius(z, z).is_origin()
        assert geometry.mobius(z, ORIGIN).z == pytest.approx(z.z, abs=1e-15)


class TestKernel:
    def test_at_origin(self):
        z = DiscPoint.from_xy(0.3, -0.2)
        assert geometry.kernel(ORIGIN, z) == pytest.approx(1.0)

    def test_half_half(self):
        z = DiscPoint.from_xy(0.5, 0.0)
        assert geometry.kernel(z, z).real == pytest.approx(4.0 * math.log(4.0 / 3.0), abs=1e-12)

    @given(disc_points(min_depth=1e-3), disc_points(min_depth=1e-3))
    def test_hermitian(self, z, w):
        a = geometry.kernel(w, z)
        b = geometry.kernel(z, w)
        assert abs(a - b.conjugate()) < 1e-10 * max(1.0, abs(a))

    def test_gram_positive_semidefinite(self):
        rng = np.random.default_rng(11)
        pts = [
            DiscPoint(rng.uniform(0, 2 * math.pi), rng.uniform(0.05, 0.9)) for _ in range(8)
        ]
        gram = np.array([[geometry.kernel(a, b) for b in pts] for a in pts])
        eigs = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
        assert eigs.min() >= -1e-9

    def test_norm_values(self):
        assert geometry.kernel_norm_sq(ORIGIN) == pytest.approx(1.0)
        deep = DiscPoint(0.0, 2.0**-5)
        assert geometry.kernel_norm_sq(deep) == pytest.approx(2.9708, abs=1e-3)
        assert geometry.kernel_norm_sq(DiscPoint(0.0, 0.1)) < geometry.kernel_norm_sq(
            DiscPoint(0.0, 0.01)
        )

    def test_norm_matches_power_series(self):
        z = DiscPoint(1.0, 0.25)
        x = z.r**2
        series = sum(x**n / (n + 1) for n in range(200))
        assert geometry.kernel_norm_sq(z) == pytest.approx(series, rel=1e-12)


class TestDirichletMetric:
    def test_zero_iff_equal(self):
        z = DiscPoint(0.7, 0.3)
        assert geometry.dirichlet_metric(z, z) == 0.0
        w = DiscPoint(0.7, 0.31)
        assert geometry.dirichlet_metric(z, w) > 0.0

    def test_origin_to_deep(self):
        deep = DiscPoint(0.0, 2.0**-5)
        expected = math.sqrt(1.0 - 1.0 / geometry.kernel_norm_sq(deep))
        assert geometry.dirichlet_metric(ORIGIN, deep) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.8145, abs=1e-3)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            a, b, c = (
                DiscPoint(rng.uniform(0, 2 * math.pi), rng.uniform(1e-3, 1.0)) for _ in range(3)
            )
            assert geometry.dirichlet_metric(a, c) <= (
                geometry.dirichlet_metric(a, b) + geometry.dirichlet_metric(b, c) + 1e-12
            )

    @given(disc_points(min_depth=1e-4), disc_points(min_depth=1e-4))
    def test_symmetric(self, z, w):
        assert geometry.dirichlet_metric(z, w) == pytest.approx(
            geometry.dirichlet_metric(w, z), abs=1e-12
        )


class TestHyperbolicDistance:
    def test_closed_form(self):
        deep = DiscPoint(0.0, 2.0**-5)
        assert geometry.hyperbolic_distance(ORIGIN, deep) == pytest.approx(
            0.5 * math.log(63.0), abs=1e-12
        )

    @given(disc_points(min_depth=1e-4), disc_points(min_depth=1e-4))
    def test_symmetric(self, z, w):
        d1 = geometry.hyperbolic_distance(z, w)
        d2 = geometry.hyperbolic_distance(w, z)
        assert d1 == pytest.approx(d2, rel=1e-10, abs=1e-12)

    def test_very_deep_points_finite(self):
        a = DiscPoint(0.0, 2.0**-500)
        b = DiscPoint(0.0, 2.0**-900)
        d = geometry.hyperbolic_distance(a, b)
        assert 100.0 < d < 400.0


class TestArcs:
    def test_boundary_arc(self):
        z = DiscPoint(0.0, 0.5)
        arc = geometry.boundary_arc(z)
        assert arc.center_angle == 0.0
        assert arc.length == 0.5
        with pytest.raises(DomainError):
            geometry.boundary_arc(ORIGIN)

    def test_arc_transform(self):
        arc = Arc(1.0, 0.04)
        assert geometry.arc_transform(arc, 1.0, 1.0).length == pytest.approx(0.04)
        assert geometry.arc_transform(arc, 0.5, 1.0).length == pytest.approx(0.2)
        assert geometry.arc_transform(Arc(1.0, 0.9), 0.5, 2.0).length == 1.0

    def test_merge_overlapping(self):
        merged = geometry.merge_arcs([Arc(0.0, 0.2), Arc(0.3, 0.2)])
        assert len(merged) == 1
        # hull spans the center gap plus one half-width on each side
        expected = (0.3 + 2.0 * math.pi * 0.2) / (2.0 * math.pi)
        assert merged[0].length == pytest.approx(expected, abs=1e-12)

    def test_merge_keeps_disjoint(self):
        merged = geometry.merge_arcs([Arc(0.0, 0.1), Arc(math.pi, 0.1)])
        assert len(merged) == 2

    def test_merge_preserves_tiny_arcs(self):
        tiny = [Arc(1.0, 2.0**-60), Arc(1.5, 2.0**-70)]
        merged = geometry.merge_arcs(tiny)
        assert sorted(a.length for a in merged) == sorted(a.length for a in tiny)

    def test_merge_wraparound(self):
        merged = geometry.merge_arcs([Arc(0.05, 0.1), Arc(-0.05, 0.1)])
        assert len(merged) == 1

    def test_merge_full_circle(self):
        arcs = [Arc(k * math.pi / 2, 0.3) for k in range(4)]
        merged = geometry.merge_arcs(arcs)
        assert len(merged) == 1 and merged[0].is_full_circle()

    @given(angles(), arc_lengths())
    def test_contains_center(self, theta, length):
        assert Arc(theta, length).contains_angle(theta)


class TestBoxes:
    def test_membership(self):
        box = geometry.carleson_box(DiscPoint(0.0, 0.25))
        assert box.contains_point(DiscPoint(0.0, 0.1))
        assert not box.contains_point(DiscPoint(0.0, 0.5))
        assert not box.contains_point(DiscPoint(math.pi, 0.1))

    def test_expanded_contains_plain(self):
        z = DiscPoint(1.0, 0.1)
        assert geometry.expanded_box(z, 0.75).contains_box(geometry.carleson_box(z))

    @given(disc_points(min_depth=1e-5, max_depth=0.5), st.floats(0.1, 0.9))
    def test_expanded_box_grows_with_smaller_eta(self, z, eta):
        wide = geometry.expanded_box(z, eta * 0.5)
        narrow = geometry.expanded_box(z, eta)
        assert wide.base_arc.length >= narrow.base_arc.length


class TestHarmonicMeasure:
    def test_at_origin_equals_length(self):
        assert geometry.harmonic_measure(ORIGIN, Arc(1.0, 0.25)) == pytest.approx(0.25, abs=1e-14)

    def test_full_circle(self):
        z = DiscPoint(2.0, 0.3)
        assert geometry.harmonic_measure(z, Arc(0.0, 1.0)) == pytest.approx(1.0, abs=1e-14)

    def test_additive_over_disjoint(self):
        z = DiscPoint(0.4, 0.5)
        a, b = Arc(0.0, 0.1), Arc(math.pi, 0.15)
        total = geometry.harmonic_measure(z, [a, b])
        assert total == pytest.approx(
            geometry.harmonic_measure(z, a) + geometry.harmonic_measure(z, b), abs=1e-13
        )

    def test_overlapping_arcs_rejected(self):
        with pytest.raises(InputError):
            geometry.harmonic_measure(ORIGIN, [Arc(0.0, 0.3), Arc(0.1, 0.3)])

    def test_matches_quadrature(self):
        z = DiscPoint(0.0, 0.5)
        arc = Arc(0.0, 0.25)
        r = z.r

        def poisson(t):
            return (1 - r * r) / abs(1 - r * cmath.exp(-1j * t)) ** 2 / (2 * math.pi)

        quad = adaptive_integrate(poisson, arc.start, arc.end, tol=1e-12)
        assert geometry.harmonic_measure(z, arc) == pytest.approx(quad, abs=1e-10)

    def test_conformal_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            z = DiscPoint(rng.uniform(0, 2 * math.pi), rng.uniform(0.05, 0.95))
            arc = Arc(rng.uniform(0, 2 * math.pi), rng.uniform(0.01, 0.4))
            image = geometry.arc_mobius_image(z, arc)
            assert geometry.harmonic_measure(z, arc) == pytest.approx(image.length, abs=1e-10)

    def test_comparable_to_image_arc_of_deep_point(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            z = DiscPoint(rng.uniform(0, 2 * math.pi), rng.uniform(0.05, 0.5))
            w = DiscPoint(
                z.theta + rng.uniform(-0.5, 0.5), rng.uniform(1e-4, z.depth / 2.0)
            )
            hm = geometry.harmonic_measure(z, geometry.boundary_arc(w))
            image_len = geometry.boundary_arc(geometry.mobius(z, w)).length
            assert 1.0 / 64.0 <= hm / image_len <= 64.0
