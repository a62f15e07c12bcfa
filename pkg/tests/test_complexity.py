import numpy as np
import pytest

from knotsteer.complexity import (ComplexityEstimate, aun, directions_for_seed,
                                  knotoid_spectrum, subchain_grid, tun)
from knotsteer.curves import open_trefoil, slipknot_curve
from knotsteer.errors import InvalidArgument
from knotsteer.geometry import PolyCurve, random_rotation, sample_directions
from knotsteer.knotoids import bundled_table, classify
from knotsteer.knotoids.diagram import extract_for_direction


def straight_curve():
    pts = np.zeros((6, 3))
    pts[:, 0] = np.arange(6)
    return PolyCurve(pts)


@pytest.fixture(scope="module")
def deep_trefoil():
    return open_trefoil(n=90, gap=0.5, tails=6)


class TestAun:
    def test_straight_exact_zero(self):
        est = aun(straight_curve(), n_dirs=64, seed=1)
        assert est.value == 0.0
        assert est.stderr == 0.0
        assert est.unclassified_fraction == 0.0

    def test_deep_trefoil_above_half(self, deep_trefoil):
        est = aun(deep_trefoil, n_dirs=200, seed=1)
        # dense-grid oracle: classify every direction of a fine lattice
        dense = sample_directions(600, "fibonacci")
        rng = np.random.default_rng(0)
        values = []
        for d in dense:
            values.append(classify(extract_for_direction(deep_trefoil, d, rng)).unravelling)
        oracle = float(np.mean(values))
        assert oracle > 0.5
        assert est.value > 0.5
        assert abs(est.value - oracle) < 0.2

    def test_deterministic_in_seed(self, deep_trefoil):
        a = aun(deep_trefoil, n_dirs=64, seed=9)
        b = aun(deep_trefoil, n_dirs=64, seed=9)
        assert a == b

    def test_needs_two_directions(self):
        with pytest.raises(InvalidArgument):
            aun(straight_curve(), n_dirs=1)

    def test_rotation_and_scale_invariance(self, deep_trefoil):
        base = aun(deep_trefoil, n_dirs=128, seed=3)
        rot = random_rotation(11)
        moved = deep_trefoil.transformed(rotation=rot, scale=2.0,
                                         translation=np.array([5.0, -2.0, 1.0]))
        other = aun(moved, n_dirs=128, seed=4)
        spread = 2.0 * (base.stderr + other.stderr)
        assert abs(base.value - other.value) <= max(spread, 0.05)

    def test_disjoint_seeds_agree(self, deep_trefoil):
        a = aun(deep_trefoil, n_dirs=128, seed=101)
        b = aun(deep_trefoil, n_dirs=128, seed=202)
        assert abs(a.value - b.value) <= 3.0 * (a.stderr + b.stderr) + 1e-9

    def test_bounded_by_table_max(self, deep_trefoil):
        est = aun(deep_trefoil, n_dirs=64, seed=2)
        if est.unclassified_fraction == 0.0:
            assert est.value <= bundled_table().max_unravelling()


class TestSpectrum:
    def test_straight_all_trivial(self):
        spec = knotoid_spectrum(straight_curve(), n_dirs=50, seed=1)
        assert spec.weights == {"trivial": 1.0}

    def test_weights_sum_to_one(self, deep_trefoil):
        spec = knotoid_spectrum(deep_trefoil, n_dirs=100, seed=5)
        assert abs(sum(spec.weights.values()) - 1.0) < 1e-9

    def test_trefoil_nontrivial_majority(self, deep_trefoil):
        spec = knotoid_spectrum(deep_trefoil, n_dirs=200, seed=5)
        assert spec.nontrivial_weight() > 0.5


class TestTun:
    def test_straight_zero(self):
        est = tun(straight_curve(), stride=2, n_dirs=16, seed=1)
        assert est.value == 0.0

    def test_grid_includes_full_chain(self):
        specs = subchain_grid(11, 4)
        assert any(s.a == 0 and s.b == 10 for s in specs)
        specs = subchain_grid(12, 4)
        assert any(s.a == 0 and s.b == 11 for s in specs)

    def test_tun_at_least_full_chain_share(self, deep_trefoil):
        n = len(deep_trefoil)
        stride = 6
        cell = (stride / (n - 1)) ** 2
        full = aun(deep_trefoil, n_dirs=32, seed=7)
        total = tun(deep_trefoil, stride=stride, n_dirs=32, seed=7)
        assert total.value >= cell * full.value - 1e-12

    def test_slipknot_contrast(self):
        slip = slipknot_curve()
        a = aun(slip, n_dirs=128, seed=1)
        t = tun(slip, stride=8, n_dirs=24, seed=1)
        assert a.value < 0.1
        assert t.value > 5.0 * max(t.stderr, 1e-12)

    def test_short_curve_rejected(self):
        with pytest.raises(InvalidArgument):
            tun(PolyCurve([[0, 0, 0], [1, 0, 0.0]]), stride=1)


class TestDirections:
    def test_rotated_lattice_deterministic(self):
        a = directions_for_seed(32, 5)
        b = directions_for_seed(32, 5)
        assert np.array_equal(a, b)
        c = directions_for_seed(32, 6)
        assert not np.array_equal(a, c)
