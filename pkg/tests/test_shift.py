from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotsets.errors import BudgetExceeded, NotPrimitive, PreconditionError
from rotsets.shift import Cycle, enumerate_cycles, full_shift, golden_mean_shift, validate_sft, word_distance


def brute_cycles(sft, max_len):
    """Every closed primitive word up to max_len, one per rotation class."""
    T = sft.transitions
    seen = set()
    for n in range(1, max_len + 1):
        for w in product(range(sft.alphabet_size), repeat=n):
            if not all(T[w[i]][w[(i + 1) % n]] for i in range(n)):
                continue
            if any(n % p == 0 and w == w[p:] + w[:p] for p in range(1, n)):
                continue
            seen.add(min(w[i:] + w[:i] for i in range(n)))
    return seen


def test_full_and_golden_shifts_are_valid():
    assert full_shift(2).alphabet_size == 2
    g = golden_mean_shift()
    assert not g.transitions[1][1]
    m = np.array(g.transitions, dtype=int)
    assert (m @ m > 0).all()


def test_period_two_matrix_is_not_primitive():
    with pytest.raises(NotPrimitive):
        validate_sft(2, [[False, True], [True, False]])


def test_cycles_of_the_two_shift_up_to_three():
    got = {str(c) for c in enumerate_cycles(full_shift(2), 3)}
    assert got == {"0", "1", "01", "001", "011"}


def test_golden_mean_cycles_up_to_two():
    assert [str(c) for c in enumerate_cycles(golden_mean_shift(), 2)] == ["0", "01"]


@pytest.mark.parametrize("sft", [full_shift(2), full_shift(3), golden_mean_shift()])
def test_length_one_cycles_are_self_loops(sft):
    loops = {(a,) for a in range(sft.alphabet_size) if sft.transitions[a][a]}
    assert {c.word for c in enumerate_cycles(sft, 1)} == loops


@pytest.mark.parametrize("sft,n", [(full_shift(2), 10), (golden_mean_shift(), 12), (full_shift(3), 6)])
def test_enumeration_matches_brute_force(sft, n):
    assert {c.word for c in enumerate_cycles(sft, n)} == brute_cycles(sft, n)


def test_cycle_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_cycles(full_shift(2), 14, budget=100)


def test_word_distance_examples():
    assert word_distance((0, 1, 1, 1), (0, 1, 1, 1)) == 0
    assert word_distance((0, 1, 1, 1), (1, 0, 0, 0)) == 1
    assert word_distance((0, 0, 1, 0, 0), (0, 0, 1, 1, 1)) == 0.125
    assert word_distance((0, 0, 1, 0, 0), (0, 0, 0, 1, 1)) == 0.25


def test_proper_power_is_rejected():
    with pytest.raises(PreconditionError):
        Cycle((0, 1, 0, 1))


@given(st.lists(st.integers(0, 2), min_size=1, max_size=8), st.integers(0, 7))
def test_cycle_is_rotation_invariant(word, k):
    w = tuple(word)
    n = len(w)
    if any(n % p == 0 and w == w[p:] + w[:p] for p in range(1, n)):
        return
    k %= n
    assert Cycle(w) == Cycle(w[k:] + w[:k])
    assert Cycle(w).word == min(w[i:] + w[:i] for i in range(n))
