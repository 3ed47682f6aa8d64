"""Locally constant vector potentials over a subshift of finite type.

A rank-k potential is a dense table indexed by k-words (base-A integers,
most significant symbol first).  Entries for forbidden words are kept at
zero and never read.  Exact potentials hold ``Fraction`` objects in an
object array; float potentials hold ``float64``.
"""
from fractions import Fraction
from math import log, pi

import numpy as np

from . import exact as ex
from .errors import (DimensionMismatch, DisallowedWord, PreconditionError,
                     RankOverflow, WordTooShort)

TABLE_CAP_BITS = 24


def default_rank_cap(sft):
    """Largest rank whose table has at most 2**24 entries."""
    return max(1, int(TABLE_CAP_BITS * log(2) / log(sft.alphabet_size) + 1e-9)) \
        if sft.alphabet_size > 1 else 1 << 20


def _check_rank(sft, rank, rank_cap):
    cap = default_rank_cap(sft) if rank_cap is None else rank_cap
    if rank > cap:
        raise RankOverflow(f"rank {rank} exceeds the rank cap {cap}")


class LocallyConstantPotential:
    def __init__(self, sft, rank, values):
        values = np.asarray(values)
        if values.ndim != 2 or values.shape[0] != sft.alphabet_size ** rank:
            raise PreconditionError("value table has the wrong shape")
        self.sft = sft
        self.rank = rank
        self.dim = values.shape[1]
        self.values = values
        self.values.setflags(write=False)

    # construction -------------------------------------------------------

    @classmethod
    def from_table(cls, sft, rank, table, exact=True, rank_cap=None):
        _check_rank(sft, rank, rank_cap)
        mask = sft.words_mask(rank)
        dims = {len(v) for v in table.values()}
        if len(dims) != 1:
            raise PreconditionError("table values must share one dimension")
        dim = dims.pop()
        vals = _zeros(sft.alphabet_size ** rank, dim, exact)
        seen = set()
        for word, v in table.items():
            w = _as_word(word)
            if len(w) != rank:
                raise PreconditionError(f"word {word!r} does not have length {rank}")
            i = sft.word_index(w)
            if not mask[i]:
                raise DisallowedWord(f"word {word!r} is not allowed")
            vals[i] = ex.as_vector(v, exact)
            seen.add(i)
        if len(seen) != int(mask.sum()):
            raise PreconditionError("table must list every allowed word exactly once")
        return cls(sft, rank, vals)

    @classmethod
    def constant(cls, sft, vector, exact=True):
        v = ex.as_vector(vector, exact)
        vals = _zeros(sft.alphabet_size, len(v), exact)
        vals[:] = v
        return cls(sft, 1, vals)

    @classmethod
    def from_function(cls, sft, rank, fn, dim, exact=True, rank_cap=None):
        _check_rank(sft, rank, rank_cap)
        vals = _zeros(sft.alphabet_size ** rank, dim, exact)
        for i in np.flatnonzero(sft.words_mask(rank)):
            vals[i] = ex.as_vector(fn(sft.index_word(int(i), rank)), exact)
        return cls(sft, rank, vals)

    # views --------------------------------------------------------------

    @property
    def exact(self):
        return self.values.dtype == object

    @property
    def mask(self):
        return self.sft.words_mask(self.rank)

    @property
    def table(self):
        out = {}
        for i in np.flatnonzero(self.mask):
            out[self.sft.index_word(int(i), self.rank)] = tuple(self.values[i])
        return out

    def allowed_values(self):
        return self.values[self.mask]

    def image(self):
        """Distinct values taken by the potential."""
        return sorted({tuple(v) for v in self.allowed_values()})

    def to_exact(self):
        if self.exact:
            return self
        vals = np.empty(self.values.shape, dtype=object)
        for idx, x in np.ndenumerate(self.values):
            vals[idx] = Fraction(float(x))
        return LocallyConstantPotential(self.sft, self.rank, vals)

    def to_float(self):
        if not self.exact:
            return self
        return LocallyConstantPotential(self.sft, self.rank, self.values.astype(float))

    def lift(self, rank, rank_cap=None):
        """Same potential re-expressed on ``rank``-words (rank >= self.rank)."""
        if rank < self.rank:
            raise PreconditionError("cannot lower the rank of a potential")
        if rank == self.rank:
            return self
        _check_rank(self.sft, rank, rank_cap)
        a = self.sft.alphabet_size
        idx = np.arange(a ** rank) // a ** (rank - self.rank)
        vals = self.values[idx].copy()
        vals[~self.sft.words_mask(rank)] = _zero(self.exact)
        return LocallyConstantPotential(self.sft, rank, vals)

    def map_values(self, fn):
        """Apply ``fn`` to every allowed value (vector -> vector)."""
        out = None
        for i in np.flatnonzero(self.mask):
            v = fn(tuple(self.values[i]))
            if out is None:
                out = _zeros(self.values.shape[0], len(v), self.exact)
            out[i] = v
        return LocallyConstantPotential(self.sft, self.rank, out)

    # arithmetic ---------------------------------------------------------

    def _aligned(self, other):
        if other.sft != self.sft:
            raise DimensionMismatch("potentials live on different shifts")
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimensions {self.dim} and {other.dim} differ")
        r = max(self.rank, other.rank)
        a, b = self.lift(r), other.lift(r)
        if a.exact != b.exact:
            a, b = a.to_exact(), b.to_exact()
        return a, b

    def __add__(self, other):
        a, b = self._aligned(other)
        return LocallyConstantPotential(a.sft, a.rank, a.values + b.values)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return LocallyConstantPotential(a.sft, a.rank, a.values - b.values)

    def __neg__(self):
        return LocallyConstantPotential(self.sft, self.rank, -self.values)

    def scaled(self, c):
        return LocallyConstantPotential(self.sft, self.rank, self.values * c)

    def __eq__(self, other):
        if not isinstance(other, LocallyConstantPotential):
            return NotImplemented
        try:
            a, b = self._aligned(other)
        except DimensionMismatch:
            return False
        m = a.mask
        return bool(np.all(a.values[m] == b.values[m]))

    __hash__ = None

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"<LocallyConstantPotential rank={self.rank} dim={self.dim} {kind}>"

    def to_json(self):
        table = {}
        for w, v in self.table.items():
            key = "".join(str(s) for s in w)
            table[key] = [str(c) if isinstance(c, Fraction) else float(c) for c in v]
        return {"sft": self.sft.to_json(), "rank": self.rank, "dim": self.dim, "table": table}


def _as_word(word):
    if isinstance(word, str):
        return tuple(int(c) for c in word)
    return tuple(int(c) for c in word)


def _zero(exact):
    return Fraction(0) if exact else 0.0


def _zeros(n, dim, exact):
    if exact:
        vals = np.empty((n, dim), dtype=object)
        vals[...] = Fraction(0)
        return vals
    return np.zeros((n, dim), dtype=float)


def potential_from_json(obj, sft=None, exact=True, rank_cap=None):
    from .shift import sft_from_json
    if sft is None:
        sft = sft_from_json(obj["sft"])
    rank, dim = int(obj["rank"]), int(obj["dim"])
    table = {k: v for k, v in obj["table"].items()}
    pot = LocallyConstantPotential.from_table(sft, rank, table, exact=exact, rank_cap=rank_cap)
    if pot.dim != dim:
        raise DimensionMismatch(f"declared dim {dim} but table has dim {pot.dim}")
    return pot


def evaluate(F, w):
    w = _as_word(w)
    if len(w) < F.rank:
        raise WordTooShort(f"word of length {len(w)} is shorter than rank {F.rank}")
    if not F.sft.allowed(w):
        raise DisallowedWord(f"word {w} contains a forbidden transition")
    return tuple(F.values[F.sft.word_index(w[:F.rank])])


def birkhoff_average(F, n, rank_cap=None):
    """The potential F^(n)/n, of rank ``F.rank + n - 1``.

    Terms are summed in shift order j = 0..n-1 so float results are
    reproducible.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if n == 1:
        return F
    k = F.rank
    R = k + n - 1
    _check_rank(F.sft, R, rank_cap)
    a = F.sft.alphabet_size
    idx = np.arange(a ** R)
    total = None
    for j in range(n):
        window = (idx // a ** (R - k - j)) % a ** k
        term = F.values[window]
        total = term if total is None else total + term
    if F.exact:
        total = total * Fraction(1, n)
    else:
        total = total / n
    total[~F.sft.words_mask(R)] = _zero(F.exact)
    return LocallyConstantPotential(F.sft, R, total)


def orbit_values(F, cycle):
    """Values of F at the points T^j x, j < p, of the periodic orbit."""
    p = cycle.period
    return [tuple(F.values[F.sft.word_index(cycle.periodic_prefix(F.rank, j))])
            for j in range(p)]


def cycle_average(F, cycle):
    if not F.sft.closed(cycle.word):
        raise DisallowedWord(f"cycle {cycle} is not a cycle of the shift")
    vals = orbit_values(F, cycle)
    total = vals[0]
    for v in vals[1:]:
        total = ex.add(total, v)
    if F.exact:
        return tuple(c / cycle.period for c in total)
    return tuple(float(c) / cycle.period for c in total)


def orbit_is_flat(F, cycle):
    vals = orbit_values(F, cycle)
    return all(v == vals[0] for v in vals)


def _image_within(G, eps_sq, R):
    from .geometry import point_sq_distance
    for v in G.image():
        if not point_sq_distance(R, v) < eps_sq:
            return False
    return True


def mane_time(F, eps, R, rank_cap=None, eps_sq=None, n_max=None):
    """Least n with every value of F^(n)/n strictly within ``eps`` of R.

    ``R`` must be the rotation set of F.  Pass ``eps_sq`` to give the
    tolerance as an exact squared radius.
    """
    if eps_sq is None:
        if eps <= 0:
            raise PreconditionError("eps must be positive")
        e = ex.as_fraction(eps)
        eps_sq = e * e
    n = 1
    while True:
        if n_max is not None and n > n_max:
            raise RankOverflow(f"no Mane time found up to n={n_max}")
        G = birkhoff_average(F, n, rank_cap=rank_cap)
        if _image_within(G, eps_sq, R):
            return n
        n += 1


def combine_cohomologous(G_tilde, F, n, rank_cap=None):
    """G_tilde + (F - F^(n)/n); the added term is a coboundary."""
    if G_tilde.sft != F.sft or G_tilde.dim != F.dim:
        raise DimensionMismatch("operands must share shift and dimension")
    if n == 1:
        return G_tilde
    return G_tilde + (F - birkhoff_average(F, n, rank_cap=rank_cap))


def sup_distance_sq(F, G):
    a, b = F._aligned(G)
    diff = (a.values - b.values)[a.mask]
    if len(diff) == 0:
        return _zero(a.exact)
    return max(ex.norm_sq(tuple(row)) for row in diff)


def sup_distance(F, G):
    return ex.fsqrt(sup_distance_sq(F, G))


def sup_norm_sq(F):
    return max(ex.norm_sq(tuple(row)) for row in F.allowed_values())


def circle_potential(depth, exact=False, midpoint=False, sft=None):
    """Locally constant approximation of x -> (cos 2 pi x, sin 2 pi x).

    The doubling map is coded by the full 2-shift through binary
    expansion.  On a depth-word w the value is taken at
    x_w = sum_i w_i 2**-i, or at the midpoint of the dyadic interval of w
    when ``midpoint`` is set (that choice commutes exactly with the
    conjugacy x -> 1 - x, which flips every bit).
    """
    from .shift import full_shift
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    sft = sft or full_shift(2)
    n = 1 << depth
    x = np.arange(n, dtype=float) / n
    if midpoint:
        x = x + 0.5 / n
    vals = np.stack([np.cos(2 * pi * x), np.sin(2 * pi * x)], axis=1)
    pot = LocallyConstantPotential(sft, depth, vals)
    return pot.to_exact() if exact else pot
