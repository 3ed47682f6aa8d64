import math
from fractions import Fraction

import numpy as np
import pytest

from rotsets import analysis
from rotsets.errors import DegenerateBody, PerturbationTooLarge
from rotsets.geometry import convex_hull
from rotsets.potential import LocallyConstantPotential
from rotsets.shift import full_shift

SQUARE = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_exterior_angles_of_a_square_sum_to_two_pi():
    angles = analysis.exterior_angles(SQUARE)
    assert angles == pytest.approx([math.pi / 2] * 4)
    rep = analysis.detect_corners(SQUARE, 1.0)
    assert len(rep.corners) == 4 and rep.angle_sum == pytest.approx(2 * math.pi)


def test_segment_has_no_corner_report():
    with pytest.raises(DegenerateBody) as info:
        analysis.detect_corners(convex_hull([(0, 0), (1, 1)]), 0.5)
    assert info.value.report.corners == []


def test_regular_polygon_threshold():
    n = 12
    pts = [(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n)]
    rep = analysis.detect_corners(convex_hull(pts), 2 * math.pi / n + 1e-9)
    assert rep.corners == []
    assert rep.max_angle == pytest.approx(2 * math.pi / n)


def test_fish_with_period_one_is_a_point_pair():
    hull, _ = analysis.fish(1, 8)
    assert len(hull.vertices) == 2
    for v in hull.vertices:
        assert float(v[0]) == pytest.approx(1.0, abs=1e-3)


def test_small_fish_is_symmetric_and_in_the_disk():
    table, hulls = analysis.fish_series([4, 6], 12)
    assert table["nested"]
    for row in table["rows"]:
        assert row["in_unit_disk"] and row["symmetry_gap"] < 1e-9


def test_distance_potential_values():
    F = analysis.distance_potential(full_shift(2), 4)
    assert F.values[0].tolist() == [0, 0]
    assert tuple(F.values[0b0010]) == (0, Fraction(-1, 2))
    assert tuple(F.values[0b1000]) == (0, -2)


def test_cone_with_zero_perturbation():
    s = full_shift(2)
    res = analysis.cone_experiment(s, LocallyConstantPotential.constant(s, (0, 0)).lift(2), 6)
    assert res["origin_is_vertex"] and res["cone_contains"]
    assert [0.0, -2.0] in res["vertices"]


def test_random_perturbation_is_admissible():
    s = full_shift(2)
    rng = np.random.default_rng(1)
    G = analysis.random_cone_perturbation(s, 4, rng)
    assert analysis.lipschitz_constant(G) < 0.4
    res = analysis.cone_experiment(s, G, 8)
    assert res["corner_at_origin"] and res["cone_contains"]


def test_large_perturbation_is_refused():
    s = full_shift(2)
    G = LocallyConstantPotential.from_table(s, 1, {"0": (0, 0), "1": (1, 0)})
    with pytest.raises(PerturbationTooLarge):
        analysis.cone_experiment(s, G, 4)


def test_lipschitz_constant_of_a_first_symbol_function():
    s = full_shift(2)
    G = LocallyConstantPotential.from_table(s, 2, {"00": (0, 0), "01": (0, 0), "10": (3, 4), "11": (3, 4)})
    assert analysis.lipschitz_constant(G) == pytest.approx(5.0)


def test_probe_is_deterministic():
    a = analysis.genericity_probe(5, [1, 2], seed=3)
    b = analysis.genericity_probe(5, [1, 2], seed=3)
    assert a == b
    assert len(a["ranks"]["2"]["vertex_counts"]) == 5
