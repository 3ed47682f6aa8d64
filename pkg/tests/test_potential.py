from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from rotsets.errors import DisallowedWord, PreconditionError, WordTooShort
from rotsets.geometry import convex_hull, point_sq_distance
from rotsets.potential import (
    LocallyConstantPotential, birkhoff_average, circle_potential, combine_cohomologous,
    cycle_average, evaluate, mane_time, potential_from_json, sup_distance, sup_distance_sq,
)
from rotsets.rotation import rotation_polytope
from rotsets.shift import Cycle, full_shift


def test_evaluate_reads_the_first_rank_symbols(E, D):
    assert evaluate(E, "0110") == (1, 0)
    assert evaluate(D, "011") == (4, 0)
    with pytest.raises(WordTooShort):
        evaluate(D, "0")


def test_forbidden_word(golden):
    F = LocallyConstantPotential.from_table(golden, 1, {"0": (1, 0), "1": (0, 1)})
    with pytest.raises(DisallowedWord):
        evaluate(F, "11")


def test_cycle_averages_of_E(E):
    assert cycle_average(E, Cycle.parse("001")) == (Fraction(2, 3), Fraction(1, 3))
    assert cycle_average(E, Cycle.parse("01")) == (Fraction(1, 2), Fraction(1, 2))


def test_birkhoff_average_matches_direct_sums(two_shift):
    F = LocallyConstantPotential.from_function(
        two_shift, 2, lambda w: (Fraction(w[0] + 2 * w[1], 3), Fraction(w[0] - w[1])), 2)
    n = 3
    B = birkhoff_average(F, n)
    assert B.rank == 4
    for w in product((0, 1), repeat=4):
        expect = [sum(evaluate(F, w[j:j + 2])[i] for j in range(n)) / n for i in range(2)]
        assert evaluate(B, w) == tuple(expect)


def test_birkhoff_average_keeps_cycle_averages(E):
    B = birkhoff_average(E, 4)
    for c in ("0", "01", "0011", "00101"):
        assert cycle_average(B, Cycle.parse(c)) == cycle_average(E, Cycle.parse(c))


def test_mane_time_of_the_coboundary(D):
    R = rotation_polytope(D)
    assert R.vertices == ((0, 0),)
    assert mane_time(D, 1, R) == 5


@pytest.mark.parametrize("n,inside", [(4, False), (5, True)])
def test_mane_containment_by_sweeping_words(D, n, inside):
    # every word of length n+1 is evaluated directly from the table of D
    origin = convex_hull([(Fraction(0), Fraction(0))])
    worst = Fraction(0)
    for w in product((0, 1), repeat=n + 1):
        s = [sum(evaluate(D, w[j:j + 2])[i] for j in range(n)) / Fraction(n) for i in range(2)]
        worst = max(worst, point_sq_distance(origin, tuple(s)))
    assert (worst < 1) is inside


def test_combine_cohomologous_preserves_the_rotation_set(two_shift):
    F = LocallyConstantPotential.from_table(
        two_shift, 2, {"00": (1, 0), "01": (0, 2), "10": (-1, 1), "11": (0, -1)})
    G = combine_cohomologous(birkhoff_average(F, 3), F, 3)
    assert rotation_polytope(G).vertices == rotation_polytope(F).vertices


def test_sup_distance_aligns_ranks(E, D):
    assert sup_distance_sq(E, E.lift(3)) == 0
    assert sup_distance_sq(E, E + D) == 16
    assert sup_distance(E, E + D) == 4.0


def test_json_round_trip(D):
    assert potential_from_json(D.to_json()) == D


def test_lift_rejects_lower_rank(D):
    with pytest.raises(PreconditionError):
        D.lift(1)


def test_circle_potential_values():
    F = circle_potential(2)
    assert evaluate(F, "00") == pytest.approx((1.0, 0.0))
    assert evaluate(F, "10") == pytest.approx((-1.0, 0.0), abs=1e-15)
    M = circle_potential(1, midpoint=True)
    assert evaluate(M, "0") == pytest.approx((0.0, 1.0), abs=1e-15)


entries = st.tuples(st.integers(-8, 8), st.integers(-8, 8)).map(
    lambda t: (Fraction(t[0], 4), Fraction(t[1], 4)))


@given(st.lists(entries, min_size=4, max_size=4), st.integers(2, 4))
def test_lift_keeps_every_value(vals, r):
    F = LocallyConstantPotential.from_function(full_shift(2), 2, lambda w: vals[2 * w[0] + w[1]], 2)
    L = F.lift(r)
    for w in product((0, 1), repeat=r):
        assert evaluate(L, w) == evaluate(F, w)
