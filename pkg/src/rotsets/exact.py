"""Small helpers for mixing exact rationals with floats.

Distances between rational points are square roots of rationals, so the
package compares *squared* distances whenever a certified answer is needed
and only takes square roots for reporting.
"""
from fractions import Fraction
from math import isqrt, sqrt

GRID_BITS = 30


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


def as_vector(v, exact=True):
    if exact:
        return tuple(as_fraction(c) for c in v)
    return tuple(float(c) for c in v)


def snap(x, bits=GRID_BITS):
    """Round a real to the dyadic grid 2**-bits (keeps denominators small)."""
    return Fraction(round(float(x) * (1 << bits)), 1 << bits)


def snap_vector(v, bits=GRID_BITS):
    return tuple(snap(c, bits) for c in v)


def sqrt_lower(q, bits=64):
    """Largest dyadic r = k/2**bits with r*r <= q, for rational q >= 0."""
    q = as_fraction(q)
    if q <= 0:
        return Fraction(0)
    scale = 1 << (2 * bits)
    k = isqrt(q.numerator * scale // q.denominator)
    return Fraction(k, 1 << bits)


def sqrt_upper(q, bits=64):
    """Smallest dyadic r = k/2**bits with r*r >= q."""
    q = as_fraction(q)
    if q <= 0:
        return Fraction(0)
    r = sqrt_lower(q, bits)
    if r * r == q:
        return r
    return r + Fraction(1, 1 << bits)


def fsqrt(q):
    return sqrt(float(q))


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def scale(c, v):
    return tuple(c * a for a in v)


def norm_sq(v):
    return sum(a * a for a in v)


def is_exact(x):
    if isinstance(x, (tuple, list)):
        return all(is_exact(c) for c in x)
    return isinstance(x, (Fraction, int))
