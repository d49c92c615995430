import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disclab import geometry, sequences
from disclab.errors import DomainError, InputError
from disclab.geometry import Arc, DiscPoint
from disclab.sequences import Sequence


def rotated(seq, angle):
    return Sequence(tuple(DiscPoint(p.theta + angle, p.depth) for p in seq.points))


@pytest.fixture(scope="module")
def boxes12():
    return sequences.generate("disjoint_boxes", {"count": 12, "eta": 0.75}, seed=3)


class TestVicinity:
    def test_disjoint_boxes_empty(self, boxes12):
        for i in range(len(boxes12)):
            assert sequences.vicinity(boxes12, i, 0.75) == []

    def test_three_point_configuration(self):
        # two stacked points share a box column; the third sits far away
        seq = Sequence(
            (DiscPoint(0.0, 0.1), DiscPoint(0.01, 0.01), DiscPoint(math.pi, 0.1))
        )
        assert sequences.vicinity(seq, 0, 0.75) == [1]
        assert sequences.vicinity(seq, 2, 0.75) == []

    def test_only_deeper_points_qualify(self):
        seq = Sequence((DiscPoint(0.0, 0.01), DiscPoint(0.0, 0.1)))
        assert sequences.vicinity(seq, 0, 0.75) == []
        assert sequences.vicinity(seq, 1, 0.75) == [0]

    def test_equal_depth_tiebreak_antisymmetric(self):
        seq = Sequence((DiscPoint(0.0, 0.05), DiscPoint(0.01, 0.05)))
        in_0 = sequences.vicinity(seq, 0, 0.75)
        in_1 = sequences.vicinity(seq, 1, 0.75)
        assert (1 in in_0) != (0 in in_1)

    @given(st.floats(0.2, 0.5), st.floats(0.55, 0.9))
    def test_monotone_in_gamma(self, g1, g2):
        seq = Sequence(
            (
                DiscPoint(0.0, 0.2),
                DiscPoint(0.3, 0.05),
                DiscPoint(5.0, 0.1),
                DiscPoint(0.1, 0.02),
            )
        )
        for i in range(len(seq)):
            small = set(sequences.vicinity(seq, i, g2))
            large = set(sequences.vicinity(seq, i, g1))
            assert small <= large

    def test_restricted_subset_of_vicinity(self, boxes12):
        seq = Sequence(
            (
                DiscPoint(0.0, 0.2),
                DiscPoint(0.05, 0.05),
                DiscPoint(0.0, 0.01),
                DiscPoint(3.0, 0.1),
            )
        )
        for i in range(len(seq)):
            assert set(sequences.restricted_vicinity(seq, i, 0.75)) <= set(
                sequences.vicinity(seq, i, 0.75)
            )

    def test_restricted_excludes_swallowed_point(self):
        # z1's expanded box swallows the plain box of the much deeper z2
        z0 = DiscPoint(0.0, 0.3)
        z1 = DiscPoint(0.0, 0.05)
        z2 = DiscPoint(0.0, 1e-4)
        seq = Sequence((z0, z1, z2))
        vic = sequences.vicinity(seq, 0, 0.75)
        assert vic == [1, 2]
        assert sequences.restricted_vicinity(seq, 0, 0.75) == [1]


class TestWeakSeparation:
    def test_duplicate_fails(self):
        p = DiscPoint(1.0, 0.2)
        report = sequences.check_weak_separation(Sequence((p, p)))
        assert not report.passed
        assert report.params["metric_min"] == 0.0

    def test_antipodal_points(self):
        seq = Sequence((DiscPoint(0.0, 0.1), DiscPoint(math.pi, 0.1)))
        report = sequences.check_weak_separation(seq)
        assert report.params["metric_min"] > 0.9

    def test_radial_geometric(self):
        seq = Sequence(tuple(DiscPoint(0.0, 2.0 ** -(n * n)) for n in range(1, 9)))
        assert sequences.check_weak_separation(seq, 0.1).passed

    def test_rotation_invariance(self):
        seq = Sequence(
            tuple(DiscPoint(0.7 * k, 0.3 / (k + 1)) for k in range(5))
        )
        base = sequences.check_weak_separation(seq).params["metric_min"]
        rot = sequences.check_weak_separation(rotated(seq, 1.234)).params["metric_min"]
        assert rot == pytest.approx(base, abs=1e-12)

    def test_single_point_rejected(self):
        with pytest.raises(DomainError):
            sequences.check_weak_separation(Sequence((DiscPoint(0.0, 0.5),)))


class TestCapacitaryCondition:
    def test_empty_vicinities_sup_zero(self, boxes12):
        report = sequences.check_capacitary_condition(boxes12, 0.75)
        assert report.sup_ratio == 0.0
        assert report.passed

    def test_single_neighbor_bounded(self):
        seq = Sequence((DiscPoint(0.0, 0.1), DiscPoint(0.0, 0.01)))
        report = sequences.check_capacitary_condition(seq, 0.75)
        assert 0.0 < report.sup_ratio <= 64.0

    def test_coincident_points_warn(self):
        p = DiscPoint(0.2, 0.3)
        report = sequences.check_capacitary_condition(Sequence((p, p)), 0.75)
        assert report.warnings


class TestCarleson:
    def test_family_without_points(self, boxes12):
        report = sequences.check_carleson(boxes12, [[Arc(0.0, 1e-5)]])
        assert report.records[0]["ratio"] == 0.0

    def test_full_circle_family(self, boxes12):
        report = sequences.check_carleson(boxes12, [[Arc(0.0, 1.0)]])
        mass = sequences.check_finite_measure(boxes12)
        assert report.records[0]["lhs"] == pytest.approx(mass)
        assert report.records[0]["ratio"] == pytest.approx(
            mass / report.records[0]["rhs"]
        )

    def test_dyadic_sweep_finite(self):
        seq = Sequence(tuple(DiscPoint(0.0, 2.0**-n) for n in range(2, 10)))
        families = [[Arc(0.0, 2.0**-k)] for k in range(1, 8)]
        report = sequences.check_carleson(seq, families)
        assert math.isfinite(report.sup_ratio)


class TestFiniteMeasureAndRestrictedSum:
    def test_origin_mass_one(self):
        assert sequences.check_finite_measure(Sequence((geometry.ORIGIN,))) == 1.0

    def test_empty_sequence(self):
        assert sequences.check_finite_measure(Sequence(())) == 0.0

    def test_restricted_sum_empty(self, boxes12):
        assert sequences.check_theorem_d(boxes12, 0.75).sup_ratio == 0.0

    def test_neighbor_at_double_norm(self):
        zi = DiscPoint(0.0, 2.0**-20)
        zj = DiscPoint(0.0, 2.0**-40)
        report = sequences.check_theorem_d(Sequence((zi, zj)), 0.75)
        ratio = report.records[0]["ratio"]
        assert ratio == pytest.approx(0.5, abs=0.02)


class TestNormalize:
    def test_deep_sequence_unchanged(self):
        pts = tuple(DiscPoint(k * 1.0, math.exp(-150 - 10 * k)) for k in range(4))
        seq = Sequence(pts)
        assert sequences.normalize(seq).points == pts

    def test_shallow_prefix_dropped(self):
        shallow = DiscPoint(0.0, 0.3)
        deep = tuple(DiscPoint(k * 1.0, math.exp(-150 - 10 * k)) for k in range(3))
        seq = Sequence((shallow,) + deep)
        assert sequences.normalize(seq).points == deep

    def test_idempotent(self):
        pts = (DiscPoint(0.0, 0.5), DiscPoint(1.0, math.exp(-200)), DiscPoint(2.0, math.exp(-210)))
        once = sequences.normalize(Sequence(pts))
        twice = sequences.normalize(once)
        assert once.points == twice.points

    def test_empty_result_warns(self):
        seq = Sequence((DiscPoint(0.0, 0.5), DiscPoint(1.0, 0.4)))
        with pytest.warns(UserWarning):
            out = sequences.normalize(seq)
        assert len(out) == 0

    def test_bad_parameters(self):
        seq = Sequence((DiscPoint(0.0, 0.5), DiscPoint(1.0, 0.4)))
        with pytest.raises(DomainError):
            sequences.normalize(seq, eta=0.5, beta=0.9)


class TestGenerators:
    def test_radial_values(self):
        seq = sequences.generate("radial", {"lam": 0.5, "count": 5})
        assert [p.r for p in seq.points] == pytest.approx(
            [0.5, 0.75, 0.875, 0.9375, 0.96875]
        )
        assert seq.tail_bound == pytest.approx(0.5**6 / 0.5)

    def test_disjoint_boxes_deterministic(self):
        a = sequences.generate("disjoint_boxes", {"count": 8}, seed=5)
        b = sequences.generate("disjoint_boxes", {"count": 8}, seed=5)
        assert a.points == b.points

    def test_union_weakly_separated(self):
        a = sequences.generate("disjoint_boxes", {"count": 6}, seed=1)
        b = sequences.generate("disjoint_boxes", {"count": 6, "depth_min": 2.0**-12, "depth_max": 2.0**-10}, seed=2)
        union = sequences.generate("union", {"parts": [a, b]})
        assert len(union) == 12
        report = sequences.check_weak_separation(union)
        assert report.params["metric_min"] > 0.0

    def test_infeasible_packing_names_point(self):
        with pytest.raises(InputError, match="cannot place point"):
            sequences.generate(
                "disjoint_boxes",
                {"count": 40, "depth_min": 0.3, "depth_max": 0.4, "eta": 0.5},
                seed=0,
            )

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            sequences.generate("spiral", {})


@pytest.fixture(scope="module")
def setup():
    seq = sequences.generate("disjoint_boxes", {"count": 6}, seed=11)
    blocks = sequences._build_blocks(seq, 0.75, (48, 192))
    return seq, blocks


class TestInterpolant:
    def test_zero_data(self, setup):
        seq, blocks = setup
        pot, energy = sequences.assemble_sobolev_interpolant(
            seq, np.zeros(len(seq)), blocks=blocks
        )
        assert energy == 0.0
        assert not pot.values.any()

    def test_linear_in_data(self, setup):
        seq, blocks = setup
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=(2, len(seq)))
        pa, _ = sequences.assemble_sobolev_interpolant(seq, a, blocks=blocks)
        pb, _ = sequences.assemble_sobolev_interpolant(seq, b, blocks=blocks)
        pab, _ = sequences.assemble_sobolev_interpolant(seq, a + b, blocks=blocks)
        assert np.abs(pab.values - pa.values - pb.values).max() < 1e-10

    def test_single_block_energy_scale(self, setup):
        seq, blocks = setup
        data = np.zeros(len(seq))
        data[0] = 1.0
        _, energy = sequences.assemble_sobolev_interpolant(seq, data, blocks=blocks)
        # block energy ~ d(z_0) * cap(block condenser), an O(1)-to-O(10) number
        assert 0.01 < energy < 1e3

    def test_length_mismatch(self, setup):
        seq, blocks = setup
        with pytest.raises(InputError):
            sequences.assemble_sobolev_interpolant(seq, [1.0, 2.0], blocks=blocks)


class TestSerialization:
    def test_sequence_json_roundtrip(self, boxes12):
        back = sequences.sequence_from_json(boxes12.to_json())
        assert len(back) == len(boxes12)
        for p, q in zip(back.points, boxes12.points):
            assert abs(p.z - q.z) < 1e-12

    def test_load_rejects_malformed(self, tmp_path):
        path = tmp_path / "seq.json"
        path.write_text("{not json")
        with pytest.raises(InputError):
            sequences.load_sequence(path)

    def test_report_json_and_csv(self, boxes12, tmp_path):
        report = sequences.check_weak_separation(boxes12)
        blob = json.dumps(report.to_json())
        assert "sup_ratio" in blob
        csv_path = tmp_path / "report.csv"
        report.to_csv(csv_path)
        assert csv_path.read_text().startswith("index,lhs,rhs,ratio")
