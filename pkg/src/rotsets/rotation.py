"""Exact rotation sets of locally constant potentials.

The potential lives on the edges of a de Bruijn-type graph whose nodes are
allowed (r-1)-words; periodic orbits are closed walks and their averages
are cycle means.  The rotation set is the convex hull of the cycle means,
and its support function in direction u is the maximum mean
cycle for the scalar weights u.F.  Everything here is done in exact
integer / rational arithmetic.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import cos, gcd, pi, sin

import numpy as np

from . import exact as ex
from .errors import DimensionUnsupported, PreconditionError, ZeroDirection
from .geometry import ConvexBody, convex_hull
from .potential import cycle_average
from .shift import DEFAULT_CYCLE_BUDGET, Cycle, enumerate_cycles

KARP_MAX_NODES = 128


@dataclass
class TransitionGraph:
    """Nodes are allowed (r-1)-words, edges allowed r-words (r >= 2)."""

    potential: object
    rank: int
    node_words: np.ndarray      # word index of each node
    node_of_word: np.ndarray    # inverse map, -1 for forbidden words
    edge_words: np.ndarray      # word index of each edge
    src: np.ndarray
    dst: np.ndarray

    @property
    def n_nodes(self):
        return len(self.node_words)

    @property
    def n_edges(self):
        return len(self.edge_words)

    def edge_values(self):
        return self.potential.values[self.edge_words]

    def integer_edge_values(self):
        """Edge values times a common denominator, as rows of Python ints."""
        if getattr(self, "_int_values", None) is None:
            vals = self.edge_values()
            den = 1
            for x in set(vals.ravel().tolist()):
                den = den * x.denominator // gcd(den, x.denominator)
            self._int_values = [tuple(x.numerator * (den // x.denominator) for x in row)
                                for row in vals.tolist()]
        return self._int_values

    def node_word(self, i):
        return self.potential.sft.index_word(int(self.node_words[i]), self.rank - 1)

    def cycle_from_nodes(self, nodes):
        return Cycle(tuple(self.node_word(i)[0] for i in nodes))


def build_graph(F):
    r = max(F.rank, 2)
    G = F.lift(r).to_exact()
    sft = F.sft
    a = sft.alphabet_size
    node_mask = sft.words_mask(r - 1)
    node_words = np.flatnonzero(node_mask)
    node_of_word = np.full(a ** (r - 1), -1, dtype=np.int64)
    node_of_word[node_words] = np.arange(len(node_words))
    edge_words = np.flatnonzero(sft.words_mask(r))
    src = node_of_word[edge_words // a]
    dst = node_of_word[edge_words % a ** (r - 1)]
    return TransitionGraph(G, r, node_words, node_of_word, edge_words, src, dst)


def _integer_weights(graph, u):
    """Positive multiple of u.F on each edge, as Python ints."""
    den = 1
    for c in u:
        den = den * c.denominator // gcd(den, c.denominator)
    coef = [c.numerator * (den // c.denominator) for c in u]
    return [sum(a * b for a, b in zip(row, coef)) for row in graph.integer_edge_values()]


def _scalar_weights(graph, u, tiebreak):
    prim = _integer_weights(graph, u)
    if tiebreak is None:
        return prim
    sec = _integer_weights(graph, tiebreak)
    bound = max(abs(b) for b in sec) if sec else 0
    # primary cycle means of simple cycles differ by at least 1/V^2
    big = 2 * graph.n_nodes ** 2 * bound + 1
    return [p * big + b for p, b in zip(prim, sec)]


def _karp(graph, w):
    """Karp's dynamic programme over walk lengths; returns (mean, node cycle)."""
    V = graph.n_nodes
    n_edges = graph.n_edges
    maxabs = max((abs(x) for x in w), default=0) + 1
    floor = -V * maxabs
    neg = 10 * (V + 1) * maxabs * -1
    in_edges = [[] for _ in range(V)]
    for e in range(n_edges):
        in_edges[int(graph.dst[e])].append(e)
    slots = max(len(x) for x in in_edges)
    pred = np.zeros((slots, V), dtype=np.int64)
    wt = np.empty((slots, V), dtype=object)
    wt[...] = neg
    for v, es in enumerate(in_edges):
        for s, e in enumerate(es):
            pred[s, v] = graph.src[e]
            wt[s, v] = w[e]
    D = np.empty((V + 1, V), dtype=object)
    D[0, :] = neg
    D[0, 0] = 0
    arg = np.zeros((V + 1, V), dtype=np.int64)
    for k in range(1, V + 1):
        cand = D[k - 1][pred] + wt
        best = cand.argmax(axis=0)
        arg[k] = best
        D[k] = cand[best, np.arange(V)]
    lam, vstar = None, None
    for v in range(V):
        if D[V, v] < floor:
            continue
        worst = None
        for k in range(V):
            if D[k, v] < floor:
                continue
            q = Fraction(D[V, v] - D[k, v], V - k)
            if worst is None or q < worst:
                worst = q
        if lam is None or worst > lam:
            lam, vstar = worst, v
    walk = [vstar]
    v = vstar
    for k in range(V, 0, -1):
        v = int(pred[arg[k, v], v])
        walk.append(v)
    walk.reverse()
    last = {}
    for j, node in enumerate(walk):
        if node in last:
            cyc = walk[last[node]:j]
            return lam, cyc
        last[node] = j
    raise AssertionError("Karp walk contains no cycle")


def _out_lists(n_nodes, src, dst, w):
    out = [[] for _ in range(n_nodes)]
    for e in range(len(src)):
        out[int(src[e])].append((int(dst[e]), w[e]))
    return out


def _evaluate(out, pol, zero, mean):
    """Gain and bias of a policy; ``mean`` turns (total, length) into a gain."""
    V = len(out)
    nxt = [out[u][pol[u]][0] for u in range(V)]
    gain = [None] * V
    bias = [None] * V
    state = [0] * V
    cycles = []
    for s in range(V):
        if state[s]:
            continue
        path = []
        u = s
        while state[u] == 0:
            state[u] = 1
            path.append(u)
            u = nxt[u]
        if state[u] == 1:
            cyc = path[path.index(u):]
            g = mean(sum(out[x][pol[x]][1] for x in cyc), len(cyc))
            cycles.append((g, cyc))
            for x in cyc:
                gain[x] = g
            bias[cyc[0]] = zero
            for x in reversed(cyc[1:]):
                bias[x] = out[x][pol[x]][1] - g + bias[nxt[x]]
        for x in path:
            state[x] = 2
    for s in range(V):
        if bias[s] is not None:
            continue
        stack = []
        u = s
        while bias[u] is None:
            stack.append(u)
            u = nxt[u]
        for x in reversed(stack):
            y = nxt[x]
            gain[x] = gain[y]
            bias[x] = out[x][pol[x]][1] - gain[y] + bias[y]
    return gain, bias, cycles


def _improve(out, pol, gain, bias, tol):
    changed = False
    for u, edges in enumerate(out):
        cur = pol[u]
        best_g = max(gain[v] for v, _ in edges)
        if best_g > gain[u] + tol:
            pol[u] = next(i for i, (v, _) in enumerate(edges) if gain[v] >= best_g - tol)
            changed = True
            continue
        best_val, best_i = bias[u], cur
        for i, (v, wt) in enumerate(edges):
            if abs(gain[v] - gain[u]) > tol:
                continue
            val = wt - gain[u] + bias[v]
            if val > best_val + tol:
                best_val, best_i = val, i
        if best_i != cur:
            pol[u] = best_i
            changed = True
    return changed


def _initial_policy(out):
    return [max(range(len(o)), key=lambda i: o[i][1]) for o in out]


def _howard_exact(out, pol=None):
    """Howard's policy iteration in exact arithmetic; returns (mean, node cycle)."""
    pol = _initial_policy(out) if pol is None else list(pol)
    while True:
        gain, bias, cycles = _evaluate(out, pol, Fraction(0), Fraction)
        if not _improve(out, pol, gain, bias, 0):
            return max(cycles, key=lambda c: c[0])


def _howard_float(out):
    fout = [[(v, float(x)) for v, x in o] for o in out]
    scale = max((abs(x) for o in fout for _, x in o), default=1.0) or 1.0
    tol = 1e-9 * scale
    pol = _initial_policy(fout)
    for _ in range(10000):
        gain, bias, _ = _evaluate(fout, pol, 0.0, lambda t, n: t / n)
        if not _improve(fout, pol, gain, bias, tol):
            break
    return pol


def _certify(out, pol):
    """Exact check that a policy is optimal.

    Returns (mean, node cycle, tight) where ``tight[u]`` lists the
    out-edges of u on which some maximum mean cycle may run, or None when
    the policy cannot be certified.
    """
    V = len(out)
    _, _, cycles = _evaluate(out, pol, Fraction(0), Fraction)
    lam, cyc = max(cycles, key=lambda c: c[0])
    if any(g != lam for g, _ in cycles):
        return None
    a, b = lam.numerator, lam.denominator
    nxt = [out[u][pol[u]][0] for u in range(V)]
    h = [None] * V
    for _, c in cycles:
        h[c[0]] = 0
        for x in reversed(c[1:]):
            h[x] = b * out[x][pol[x]][1] - a + h[nxt[x]]
    for s in range(V):
        stack = []
        u = s
        while h[u] is None:
            stack.append(u)
            u = nxt[u]
        for x in reversed(stack):
            h[x] = b * out[x][pol[x]][1] - a + h[nxt[x]]
    tight = []
    for u, edges in enumerate(out):
        row = []
        for i, (v, wt) in enumerate(edges):
            slack = h[u] - (b * wt - a + h[v])
            if slack < 0:
                return None
            if slack == 0:
                row.append(i)
        tight.append(row)
    return lam, cyc, tight


def _max_mean(out):
    """Float policy iteration, certified exactly; exact iteration as fallback."""
    pol = _howard_float(out)
    cert = _certify(out, pol)
    if cert is None:
        lam, cyc = _howard_exact(out, pol)
        pol = _policy_through(out, cyc, pol)
        cert = _certify(out, pol)
        if cert is None:
            return lam, cyc, None
    return cert


def _policy_through(out, cyc, pol):
    pol = list(pol)
    for x, y in zip(cyc, cyc[1:] + cyc[:1]):
        pol[x] = next(i for i, (v, _) in enumerate(out[x]) if v == y)
    return pol


def _critical_subgraph(out, tight, weights):
    """Tight edges, pruned to nodes lying on closed tight walks."""
    alive = set(range(len(out)))
    succ = {u: [out[u][i][0] for i in tight[u]] for u in alive}
    while True:
        indeg = {u: 0 for u in alive}
        for u in alive:
            for v in succ[u]:
                if v in alive:
                    indeg[v] += 1
        dead = {u for u in alive if indeg[u] == 0 or not any(v in alive for v in succ[u])}
        if not dead:
            break
        alive -= dead
    order = sorted(alive)
    index = {u: k for k, u in enumerate(order)}
    sub = [[(index[out[u][i][0]], weights[u][i]) for i in tight[u] if out[u][i][0] in alive]
           for u in order]
    return sub, order


def _howard(graph, w, w2=None):
    """Maximum mean cycle by certified policy iteration; ties broken by w2."""
    out = _out_lists(graph.n_nodes, graph.src, graph.dst, w)
    lam, cyc, tight = _max_mean(out)
    if w2 is None:
        return lam, cyc
    if tight is None:
        raise AssertionError("could not certify the maximum mean cycle")
    sec = _out_lists(graph.n_nodes, graph.src, graph.dst, w2)
    weights = [[x for _, x in o] for o in sec]
    sub, order = _critical_subgraph(out, tight, weights)
    _, sub_cyc, _ = _max_mean(sub)
    return lam, [order[x] for x in sub_cyc]


def max_mean_cycle(graph, direction, tiebreak=None, method="auto"):
    """Exact maximum cycle mean of u.F and a primitive cycle attaining it.

    ``tiebreak`` is a secondary direction: among maximising cycles the one
    that is also best for ``tiebreak`` is returned.  ``method`` selects
    Karp's DP or Howard's policy iteration; "auto" uses Karp up to
    KARP_MAX_NODES nodes.
    """
    u = ex.as_vector(direction)
    if all(c == 0 for c in u):
        raise ZeroDirection("direction must be non-zero")
    if tiebreak is not None:
        tiebreak = ex.as_vector(tiebreak)
    if method == "auto":
        method = "karp" if graph.n_nodes <= KARP_MAX_NODES else "howard"
    if method == "karp":
        w = _scalar_weights(graph, u, tiebreak)
        mean, nodes = _karp(graph, w)
    elif method == "howard":
        w = _scalar_weights(graph, u, None)
        w2 = None if tiebreak is None else _scalar_weights(graph, tiebreak, None)
        mean, nodes = _howard(graph, w, w2)
    else:
        raise PreconditionError(f"unknown method {method!r}")
    check = Fraction(sum(w[_edge_between(graph, a, b)] for a, b in
                         zip(nodes, nodes[1:] + nodes[:1])), len(nodes))
    if check != mean:
        raise AssertionError("witness cycle does not attain the maximum mean")
    cycle = graph.cycle_from_nodes(nodes)
    value = ex.dot(cycle_average(graph.potential, cycle), u)
    return value, cycle


def _edge_between(graph, a, b):
    a_word = int(graph.node_words[a])
    A = graph.potential.sft.alphabet_size
    last = int(graph.node_words[b]) % A
    word = a_word * A + last
    return int(np.searchsorted(graph.edge_words, word))


def rotation_polytope(F, approximate=False, n_directions=720, method="auto"):
    """Exact vertex list of R(F) with a witness cycle for every vertex."""
    graph = build_graph(F)
    Fx = graph.potential
    witnesses = {}

    def query(u, t):
        _, cyc = max_mean_cycle(graph, u, tiebreak=t, method=method)
        p = cycle_average(Fx, cyc)
        witnesses.setdefault(p, cyc)
        return p

    if F.dim == 1:
        pts = [query((1,), None), query((-1,), None)]
    elif F.dim == 2:
        one, zero = Fraction(1), Fraction(0)
        p = query((one, zero), (zero, one))
        q = query((-one, zero), (zero, -one))
        if p == q:
            pts = [p]
        else:
            def refine(a, b):
                n = (b[1] - a[1], a[0] - b[0])
                c = query(n, ex.sub(b, a))
                if ex.dot(c, n) == ex.dot(a, n):
                    return []
                return refine(a, c) + [c] + refine(c, b)
            pts = [q] + refine(q, p) + [p] + refine(p, q)
    else:
        if not approximate:
            raise DimensionUnsupported("exact rotation polytopes are implemented for dim <= 2")
        pts = [query(u, None) for u in _sphere_directions(F.dim, n_directions)]
    body = convex_hull(pts)
    wit = {v: witnesses[v] for v in body.vertices}
    for v, c in wit.items():
        if cycle_average(Fx, c) != v:
            raise AssertionError("vertex witness mismatch")
    return ConvexBody(body.dim, body.vertices, wit, approximate=F.dim > 2)


def _sphere_directions(d, n):
    rng = np.random.default_rng(0)
    dirs = rng.normal(size=(n, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return [tuple(ex.snap(c, 40) for c in row) for row in dirs]


def direction_sweep(n):
    """n rational unit-ish directions evenly spread in angle."""
    return [(ex.snap(cos(2 * pi * i / n), 40), ex.snap(sin(2 * pi * i / n), 40)) for i in range(n)]


def periodic_rotation_points(F, max_period, budget=DEFAULT_CYCLE_BUDGET):
    """(point, witness cycles) for all primitive cycles of length <= max_period."""
    if max_period < 1:
        raise PreconditionError("max_period must be >= 1")
    found = {}
    for c in enumerate_cycles(F.sft, max_period, budget=budget):
        found.setdefault(cycle_average(F, c), []).append(c)
    return [(p, tuple(cs)) for p, cs in sorted(found.items())]


def brute_force_rotation(F, max_cycle_len, budget=DEFAULT_CYCLE_BUDGET):
    pts = [p for p, _ in periodic_rotation_points(F, max_cycle_len, budget=budget)]
    return convex_hull(pts)


def node_count(F):
    return int(F.sft.words_mask(max(F.rank, 2) - 1).sum())
