import itertools

import numpy as np
import pytest

from knotsteer.curves import (braid_trace_closure, connected_sum, figure_eight_curve,
                              granny_curve, open_trefoil, rational_knot_curve)
from knotsteer.errors import InvalidArgument
from knotsteer.geometry import PolyCurve, random_rotation
from knotsteer.knot_id import (KnotType, UNKNOT_NAME, bundled_knot_table,
                               classify_closed_diagram, classify_family,
                               coloring_matrix, knot_determinant, stochastic_closure)
from knotsteer.knotoids.diagram import extract_for_direction
from knotsteer.knotoids.moves import deep_simplify


def closed_diagram_of(points, rng, direction=None):
    d = direction if direction is not None else np.array([0.013, 0.019, 1.0])
    d = d / np.linalg.norm(d)
    return deep_simplify(extract_for_direction(PolyCurve(points), d, rng, closed=True))


def count_colorings(diagram, p):
    """Oracle: brute-force Fox p-colorings of a closed diagram."""
    rows = coloring_matrix(diagram)
    n = len(rows)
    if n == 0:
        return p
    total = 0
    for combo in itertools.product(range(p), repeat=n):
        if all(sum(c * x for c, x in zip(row, combo)) % p == 0 for row in rows):
            total += 1
    return total


class TestDeterminant:
    def test_unknot(self, rng):
        d = closed_diagram_of(braid_trace_closure([1], 2), rng)
        assert knot_determinant(d) == 1

    def test_trefoil_vs_coloring_oracle(self, rng):
        d = closed_diagram_of(braid_trace_closure([1, 1, 1], 2), rng)
        assert knot_determinant(d) == 3
        # nontrivial 3-colorings exist iff 3 | det; count must exceed p
        assert count_colorings(d, 3) == 9
        assert count_colorings(d, 5) == 5

    def test_figure_eight_vs_coloring_oracle(self, rng):
        d = closed_diagram_of(rational_knot_curve([2, 2]), rng)
        assert knot_determinant(d) == 5
        assert count_colorings(d, 5) == 25
        assert count_colorings(d, 3) == 3

    def test_granny_multiplicative(self, rng):
        tre = braid_trace_closure([1, 1, 1], 2)
        d = closed_diagram_of(connected_sum(tre, tre), rng)
        assert knot_determinant(d) == 9

    def test_composite_with_figure_eight(self, rng):
        tre = braid_trace_closure([1, 1, 1], 2)
        fig8 = rational_knot_curve([2, 2])
        d = closed_diagram_of(connected_sum(tre, fig8), rng)
        assert knot_determinant(d) == 15


class TestFamilies:
    def test_examples(self):
        assert classify_family("5_1") == "torus"
        assert classify_family("5_2") == "twist"
        assert classify_family("3_1#3_1") == "composite"
        assert classify_family("3_1") == "torus"
        assert classify_family("0_1") == "unknot"
        assert classify_family("6_3") == "other"

    def test_table_families_consistent(self):
        for entry in bundled_knot_table().entries:
            assert entry.family == classify_family(entry.name)


class TestClassification:
    def test_prime_table_roundtrip(self, rng):
        # every constructed prime diagram classifies back to its own name
        for name, twists in (("3_1", [3]), ("4_1", [2, 2]), ("5_2", [3, 2]),
                             ("6_2", [3, 1, 2]), ("7_1", [7])):
            d = closed_diagram_of(rational_knot_curve(twists), rng)
            assert classify_closed_diagram(d).name == name

    def test_det_tie_break(self, rng):
        # 4_1 and 5_1 share determinant 5; fingerprints separate them
        d41 = closed_diagram_of(rational_knot_curve([2, 2]), rng)
        d51 = closed_diagram_of(rational_knot_curve([5]), rng)
        assert knot_determinant(d41) == knot_determinant(d51) == 5
        assert classify_closed_diagram(d41).name == "4_1"
        assert classify_closed_diagram(d51).name == "5_1"


class TestStochasticClosure:
    def test_straight_segment_unknot(self):
        pts = np.zeros((8, 3))
        pts[:, 0] = np.arange(8)
        dist = stochastic_closure(PolyCurve(pts), n_closures=40, seed=1)
        assert dist.fractions == {UNKNOT_NAME: 1.0}

    def test_open_trefoil_plurality(self):
        dist = stochastic_closure(open_trefoil(n=90, gap=0.5, tails=6),
                                  n_closures=60, seed=2)
        assert dist.dominant == "3_1"
        assert dist.fraction("3_1") >= 0.9

    def test_figure_eight_plurality(self):
        dist = stochastic_closure(figure_eight_curve(n=140, gap=0.4, tails=6),
                                  n_closures=60, seed=3)
        assert dist.dominant == "4_1"
        assert dist.fraction("4_1") >= 0.9

    def test_granny_plurality(self):
        dist = stochastic_closure(granny_curve(), n_closures=60, seed=4)
        assert dist.dominant == "3_1#3_1"

    def test_fractions_sum_to_one(self):
        dist = stochastic_closure(open_trefoil(n=90, gap=0.5, tails=4),
                                  n_closures=30, seed=5)
        assert abs(sum(dist.fractions.values()) - 1.0) < 1e-9

    def test_rotation_invariant_plurality(self):
        base = open_trefoil(n=90, gap=0.5, tails=6)
        rotated = base.transformed(rotation=random_rotation(3))
        a = stochastic_closure(base, n_closures=50, seed=6)
        b = stochastic_closure(rotated, n_closures=50, seed=6)
        assert a.dominant == b.dominant == "3_1"
        assert abs(a.fraction("3_1") - b.fraction("3_1")) <= 0.1

    def test_needs_positive_closures(self):
        with pytest.raises(InvalidArgument):
            stochastic_closure(open_trefoil(), n_closures=0)

    def test_deterministic(self):
        curve = open_trefoil(n=90, gap=0.5, tails=4)
        a = stochastic_closure(curve, n_closures=25, seed=8)
        b = stochastic_closure(curve, n_closures=25, seed=8)
        assert a == b
