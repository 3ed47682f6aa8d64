"""Subshifts of finite type, their periodic orbits and the word metric."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded, NotPrimitive, PreconditionError, UniquelyErgodicRisk

DEFAULT_CYCLE_BUDGET = 10**7


def _least_rotation(word):
    n = len(word)
    return min(tuple(word[i:] + word[:i]) for i in range(n))


def _is_primitive_word(word):
    n = len(word)
    for p in range(1, n):
        if n % p == 0 and tuple(word[p:] + word[:p]) == tuple(word):
            return False
    return True


@dataclass(frozen=True)
class Cycle:
    """A primitive periodic word stored in its least rotation.

    Two cycles compare equal iff they describe the same periodic orbit.
    """

    word: tuple

    def __post_init__(self):
        w = tuple(int(s) for s in self.word)
        if not w:
            raise PreconditionError("a cycle needs at least one symbol")
        if not _is_primitive_word(w):
            raise PreconditionError(f"word {w} is a proper power")
        object.__setattr__(self, "word", _least_rotation(w))

    @classmethod
    def parse(cls, text):
        return cls(tuple(int(c) for c in text))

    @property
    def period(self):
        return len(self.word)

    def rotations(self):
        w = self.word
        return [w[i:] + w[:i] for i in range(len(w))]

    def periodic_prefix(self, length, start=0):
        """First ``length`` symbols of the periodic point ``T^start`` of the orbit."""
        p = len(self.word)
        return tuple(self.word[(start + i) % p] for i in range(length))

    def __str__(self):
        if all(s < 10 for s in self.word):
            return "".join(str(s) for s in self.word)
        return ",".join(str(s) for s in self.word)

    def __lt__(self, other):
        return (len(self.word), self.word) < (len(other.word), other.word)


@dataclass(frozen=True, eq=False)
class Sft:
    """One-sided subshift of finite type on symbols ``0..alphabet_size-1``.

    ``transitions[a][b]`` is true iff ``b`` may follow ``a``.  Use
    :func:`validate_sft` to build one; it certifies primitivity.
    """

    alphabet_size: int
    transitions: tuple

    def __eq__(self, other):
        return (isinstance(other, Sft) and self.alphabet_size == other.alphabet_size
                and self.transitions == other.transitions)

    def __hash__(self):
        return hash((self.alphabet_size, self.transitions))

    @cached_property
    def matrix(self):
        return np.array(self.transitions, dtype=bool)

    def allowed(self, word):
        return all(self.transitions[a][b] for a, b in zip(word, word[1:]))

    def closed(self, word):
        return self.allowed(word) and bool(self.transitions[word[-1]][word[0]])

    def word_index(self, word):
        idx = 0
        for s in word:
            idx = idx * self.alphabet_size + s
        return idx

    def index_word(self, index, length):
        a = self.alphabet_size
        out = []
        for _ in range(length):
            index, s = divmod(index, a)
            out.append(s)
        return tuple(reversed(out))

    def words_mask(self, length):
        """Boolean array over all ``A**length`` words, true on allowed ones."""
        return _words_mask(self, length)

    def allowed_words(self, length):
        return [self.index_word(int(i), length) for i in np.flatnonzero(self.words_mask(length))]

    def to_json(self):
        forbidden = [[a, b] for a in range(self.alphabet_size)
                     for b in range(self.alphabet_size) if not self.transitions[a][b]]
        return {"alphabet": self.alphabet_size, "forbidden": forbidden}


_MASKS = {}


def _words_mask(sft, length):
    key = (sft, length)
    if key in _MASKS:
        return _MASKS[key]
    a = sft.alphabet_size
    if length <= 1:
        mask = np.ones(a ** max(length, 0), dtype=bool)
    else:
        prev = _words_mask(sft, length - 1)
        idx = np.arange(a ** length)
        head = idx // a
        last_two = idx % (a * a)
        mask = prev[head] & sft.matrix.reshape(-1)[last_two]
    mask.setflags(write=False)
    _MASKS[key] = mask
    return mask


def _is_matrix_primitive(m):
    n = m.shape[0]
    power = m.astype(np.int64)
    base = m.astype(np.int64)
    # Wielandt: a primitive n x n matrix has a positive power at (n-1)^2 + 1
    for _ in range((n - 1) ** 2):
        power = np.minimum(power @ base, 1)
        if power.all():
            return True
    return bool(power.all())


def validate_sft(alphabet_size, transitions):
    if alphabet_size < 1:
        raise PreconditionError("alphabet_size must be positive")
    m = np.asarray(transitions, dtype=bool)
    if m.shape != (alphabet_size, alphabet_size):
        raise PreconditionError(f"transition matrix must be {alphabet_size}x{alphabet_size}")
    if not _is_matrix_primitive(m):
        raise NotPrimitive("transition matrix is reducible or periodic")
    sft = Sft(alphabet_size, tuple(tuple(bool(x) for x in row) for row in m))
    if len(enumerate_cycles(sft, alphabet_size)) < 2:
        raise UniquelyErgodicRisk("fewer than two primitive cycles: the shift is uniquely ergodic")
    return sft


def full_shift(alphabet_size=2):
    return validate_sft(alphabet_size, np.ones((alphabet_size, alphabet_size), dtype=bool))


def golden_mean_shift():
    return validate_sft(2, [[True, True], [True, False]])


def sft_from_json(obj):
    n = int(obj["alphabet"])
    m = np.ones((n, n), dtype=bool)
    for a, b in obj.get("forbidden", []):
        m[int(a), int(b)] = False
    return validate_sft(n, m)


def enumerate_cycles(sft, max_len, budget=DEFAULT_CYCLE_BUDGET):
    """All primitive cycles of length <= max_len, ordered by length then word.

    Depth-first search over transition-allowed prefixes of Lyndon words
    (the least rotations of primitive necklaces); a prefix is extended by
    symbol ``j`` only when it stays a pre-necklace, which is the usual
    Fredricksen-Kessler-Maiorana rule.
    """
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")
    trans = sft.transitions
    found = []
    word = []

    def extend(p):
        t = len(word)
        if p == t and trans[word[-1]][word[0]]:
            found.append(tuple(word))
            if len(found) > budget:
                raise BudgetExceeded(f"cycle budget {budget} exceeded at length <= {max_len}")
        if t == max_len:
            return
        lo = word[t - p]
        for j in range(lo, sft.alphabet_size):
            if not trans[word[-1]][j]:
                continue
            word.append(j)
            extend(p if j == lo else t + 1)
            word.pop()

    for s in range(sft.alphabet_size):
        word.append(s)
        extend(1)
        word.pop()
    found.sort(key=lambda w: (len(w), w))
    return [Cycle(w) for w in found]


def word_distance(x, y):
    """Shift metric 2**-k, k the length of the longest common prefix.

    Sequences are compared over the shorter horizon; agreement on all of it
    counts as distance zero.
    """
    if len(x) == 0 or len(y) == 0:
        raise PreconditionError("sequences must be non-empty")
    k = 0
    for a, b in zip(x, y):
        if a != b:
            return 2.0 ** (-k)
        k += 1
    return 0.0
