import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rotsets.errors import DimensionUnsupported, ZeroDirection
from rotsets.geometry import convex_hull, hausdorff_distance_sq, support_function
from rotsets.potential import LocallyConstantPotential, cycle_average, sup_distance_sq
from rotsets.rotation import (
    brute_force_rotation, build_graph, max_mean_cycle, node_count, periodic_rotation_points,
    rotation_polytope,
)
from rotsets.shift import full_shift, golden_mean_shift

F_ = Fraction


def random_potential(sft, rank, rng, den=8, span=8):
    return LocallyConstantPotential.from_function(
        sft, rank, lambda w: (F_(rng.randint(-span, span), den), F_(rng.randint(-span, span), den)), 2)


def test_graph_sizes(E, golden):
    g = build_graph(E)
    assert (g.n_nodes, g.n_edges) == (2, 4)
    g = build_graph(E.lift(3))
    assert (g.n_nodes, g.n_edges) == (4, 8)
    G = LocallyConstantPotential.from_table(golden, 2, {"00": (1, 0), "01": (0, 1), "10": (0, 0)})
    assert (build_graph(G).n_nodes, build_graph(G).n_edges) == (2, 3)


def test_max_mean_cycle_of_E(E):
    g = build_graph(E)
    assert max_mean_cycle(g, (1, 0)) == (1, max_mean_cycle(g, (1, 0))[1])
    assert str(max_mean_cycle(g, (1, 0))[1]) == "0"
    val, cyc = max_mean_cycle(g, (1, 1))
    assert val == 1
    with pytest.raises(ZeroDirection):
        max_mean_cycle(g, (0, 0))


def test_tiebreak_picks_the_extreme_cycle(two_shift):
    F = LocallyConstantPotential.from_table(two_shift, 1, {"0": (0, 0), "1": (0, 1)})
    g = build_graph(F)
    assert str(max_mean_cycle(g, (1, 0), tiebreak=(0, 1))[1]) == "1"
    assert str(max_mean_cycle(g, (1, 0), tiebreak=(0, -1))[1]) == "0"


def test_rotation_set_of_E_is_the_diagonal_segment(E):
    R = rotation_polytope(E)
    assert R.vertices == ((0, 1), (1, 0))
    assert {str(c) for c in R.witnesses.values()} == {"0", "1"}


def test_golden_mean_triangle(golden):
    F = LocallyConstantPotential.from_table(golden, 1, {"0": (1, 0), "1": (0, 1)})
    R = rotation_polytope(F)
    assert R.vertices == ((F_(1, 2), F_(1, 2)), (1, 0))


def test_two_fixed_points_span_a_segment(two_shift):
    F = LocallyConstantPotential.from_table(
        two_shift, 2, {"00": (1, 1), "01": (-1, 1), "10": (1, -1), "11": (-1, -1)})
    R = rotation_polytope(F)
    # the 01 orbit averages to the origin, inside the segment
    assert R.vertices == ((-1, -1), (1, 1))


def test_witnesses_reproduce_vertices(two_shift):
    rng = random.Random(3)
    F = random_potential(two_shift, 3, rng)
    R = rotation_polytope(F)
    for v, c in R.witnesses.items():
        assert cycle_average(F, c) == v


def test_three_dimensional_exact_is_refused(two_shift):
    F = LocallyConstantPotential.from_table(two_shift, 1, {"0": (1, 0, 0), "1": (0, 1, 0)})
    with pytest.raises(DimensionUnsupported):
        rotation_polytope(F)
    R = rotation_polytope(F, approximate=True, n_directions=50)
    assert R.approximate and len(R.vertices) == 2


@pytest.mark.parametrize("sft", [full_shift(2), golden_mean_shift(), full_shift(3)])
@pytest.mark.parametrize("rank", [1, 2, 3])
def test_polytope_equals_brute_force(sft, rank):
    rng = random.Random(rank * 100 + sft.alphabet_size)
    for _ in range(4):
        F = random_potential(sft, rank, rng)
        assert rotation_polytope(F) == brute_force_rotation(F, node_count(F))


def test_karp_and_howard_agree(two_shift):
    rng = random.Random(11)
    for _ in range(10):
        F = random_potential(two_shift, 4, rng)
        g = build_graph(F)
        pts = dict(periodic_rotation_points(F, node_count(F)))
        for u in ((1, 0), (0, 1), (-2, 1), (1, -3), (-1, -1)):
            a, ca = max_mean_cycle(g, u, method="karp")
            b, cb = max_mean_cycle(g, u, method="howard")
            best = max(p[0] * u[0] + p[1] * u[1] for p in pts)
            assert a == b == best
        assert rotation_polytope(F, method="howard") == rotation_polytope(F, method="karp")


def test_support_identity(two_shift):
    rng = random.Random(5)
    F = random_potential(two_shift, 3, rng)
    R, g = rotation_polytope(F), build_graph(F)
    for u in ((1, 0), (F_(1, 3), F_(-2, 7)), (-5, 2)):
        assert support_function(R, u)[0] == max_mean_cycle(g, u)[0]


entry = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


@given(st.lists(entry, min_size=4, max_size=4), st.lists(entry, min_size=4, max_size=4))
def test_rotation_map_is_one_lipschitz(a, b):
    sft = full_shift(2)
    F = LocallyConstantPotential.from_function(sft, 2, lambda w: a[2 * w[0] + w[1]], 2)
    G = LocallyConstantPotential.from_function(sft, 2, lambda w: b[2 * w[0] + w[1]], 2)
    assert hausdorff_distance_sq(rotation_polytope(F), rotation_polytope(G)) <= sup_distance_sq(F, G)


@given(st.lists(entry, min_size=2, max_size=2), entry)
def test_constant_shift_translates_the_set(a, c):
    sft = full_shift(2)
    F = LocallyConstantPotential.from_function(sft, 1, lambda w: a[w[0]], 2)
    C = LocallyConstantPotential.constant(sft, c)
    assert rotation_polytope(F + C) == rotation_polytope(F).translated(tuple(map(F_, c)))
