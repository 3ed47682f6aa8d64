from fractions import Fraction

import pytest
from hypothesis import settings

from rotsets.potential import LocallyConstantPotential
from rotsets.shift import full_shift, golden_mean_shift

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE = {}


@pytest.fixture
def two_shift():
    return full_shift(2)


@pytest.fixture
def golden():
    return golden_mean_shift()


@pytest.fixture
def E(two_shift):
    return LocallyConstantPotential.from_table(two_shift, 1, {"0": (1, 0), "1": (0, 1)})


@pytest.fixture
def D(two_shift):
    """4(h o T - h) with h the first symbol: a coboundary."""
    return LocallyConstantPotential.from_table(
        two_shift, 2, {"00": (0, 0), "01": (4, 0), "10": (-4, 0), "11": (0, 0)})


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def frac(x):
    return Fraction(x)
