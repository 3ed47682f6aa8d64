"""Constructive realisation of convex bodies as rotation sets.

The pipeline enlarges a rotation set by pinning periodic orbits to new
target values (``enlarge_potential``), iterates a contraction step that
brings the rotation set closer to a target body K while moving the
potential by a controlled amount, and wraps it with an adjustment that
first pushes an arbitrary potential inside K.

Every distance bound is certified on squared quantities in exact rational
arithmetic.  Square roots appear only in reported floats and through
rational lower/upper bounds chosen on the safe side.
"""
import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import exact as ex
from .errors import (CertificateFailure, IterationCap, NoPeriodicPointClose,
                     PreconditionError, RankOverflow, SingletonRotationSet,
                     TargetsNotContaining)
from .geometry import (ConvexBody, affine_hull, body_in_relint, body_subset,
                       boundary_net, contains, convex_hull, hausdorff_distance_sq,
                       in_relative_interior, point_sq_distance, project, shrink)
from .potential import (LocallyConstantPotential, birkhoff_average, cycle_average, default_rank_cap,
                        orbit_values, sup_distance_sq)
from .rotation import periodic_rotation_points, rotation_polytope
from .shift import enumerate_cycles

KAPPA = Fraction(29, 30)
C_BOUND = 30
PIN_FACTOR = Fraction(7, 6)
OPENNESS_FACTOR = 2 + 4 * C_BOUND
DEFAULT_MAX_PERIOD = 12
SNAP_BITS = 40
GOAL_RATIO = Fraction(2, 3)


@dataclass
class Limits:
    """Resource caps for one realisation run."""

    rank_cap: int = None
    max_period: int = DEFAULT_MAX_PERIOD
    mane_n_max: int = 16
    iteration_margin: int = 10


DEFAULT_LIMITS = Limits()


@dataclass
class StepRecord:
    iteration: int
    eps_sq: Fraction
    new_eps_sq: Fraction
    step_sq: Fraction
    rank: int
    mane_n: int
    depth: int
    split: bool
    nested: bool
    inside: bool
    cumulative_upper: Fraction = Fraction(0)
    z_points: list = field(default_factory=list)
    y_points: list = field(default_factory=list)
    w_points: list = field(default_factory=list)
    cycles: list = field(default_factory=list)
    rotation_vertices: list = field(default_factory=list)

    @property
    def d_h(self):
        return math.sqrt(self.eps_sq)

    @property
    def new_d_h(self):
        return math.sqrt(self.new_eps_sq)

    @property
    def step_norm(self):
        return math.sqrt(self.step_sq)


@dataclass
class RealizationTrace:
    eps0_sq: Fraction = Fraction(0)
    records: list = field(default_factory=list)
    adjust: dict = field(default_factory=dict)
    final: dict = field(default_factory=dict)
    kappa: Fraction = KAPPA
    C: int = C_BOUND

    @property
    def iterations(self):
        return len(self.records)

    def d_h_sequence(self):
        seq = [math.sqrt(self.eps0_sq)]
        seq += [r.new_d_h for r in self.records]
        return seq

    def cumulative_movement(self):
        return self.records[-1].cumulative_upper if self.records else Fraction(0)

    def certificate(self):
        """(name, holds, detail) lines re-checking every recorded bound exactly."""
        lines = []
        k2 = self.kappa ** 2
        for t, r in enumerate(self.records, start=1):
            lines.append((f"step {t}: R(F) <= R(G) <= int K", r.nested and r.inside, ""))
            lines.append((f"step {t}: |G-F| <= kappa*eps", r.step_sq <= k2 * r.eps_sq,
                          f"{r.step_norm:.6g} <= {float(self.kappa) * r.d_h:.6g}"))
            lines.append((f"step {t}: d_H(R(G),K) <= kappa*eps", r.new_eps_sq <= k2 * r.eps_sq,
                          f"{r.new_d_h:.6g} <= {float(self.kappa) * r.d_h:.6g}"))
            env = self.kappa ** (2 * t) * self.eps0_sq
            lines.append((f"step {t}: envelope kappa^{t} eps0", r.new_eps_sq <= env,
                          f"{r.new_d_h:.6g} <= {math.sqrt(env):.6g}"))
        if self.records:
            bound = self.C * ex.sqrt_lower(self.eps0_sq)
            total = self.cumulative_movement()
            lines.append(("movement <= C*eps0", total <= bound,
                          f"{float(total):.6g} <= {float(bound):.6g}"))
        for name, (holds, detail) in self.final.items():
            lines.append((name, holds, detail))
        for name, (holds, detail) in self.adjust.items():
            lines.append((name, holds, detail))
        return lines

    def all_certified(self):
        return all(ok for _, ok, _ in self.certificate())

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "d_H", "step_norm", "rank", "mane_n"])
        for r in self.records:
            w.writerow([r.iteration, repr(r.new_d_h), repr(r.step_norm), r.rank, r.mane_n])
        return buf.getvalue()


# -- geometry helpers in a full-dimensional frame --------------------------

def _margin_sq(R, K):
    """Squared distance from R to the boundary of K (R inside K, K full-dimensional)."""
    best = None
    if K.dim == 1:
        a, b = K.vertices[0][0], K.vertices[1][0]
        for (v,) in R.vertices:
            m = min(v - a, b - v)
            val = m * m if m > 0 else 0
            best = val if best is None else min(best, val)
        return best
    for v in R.vertices:
        for a, b in K.edges():
            e = ex.sub(b, a)
            cr = e[0] * (v[1] - a[1]) - e[1] * (v[0] - a[0])
            val = cr * cr / ex.norm_sq(e) if cr > 0 else 0
            best = val if best is None else min(best, val)
    return best


def _inward_direction(K, w):
    if K.dim == 1:
        return (1.0,) if w == K.vertices[0] else (-1.0,)
    normals = []
    for a, b in K.edges():
        e = ex.sub(b, a)
        cr = e[0] * (w[1] - a[1]) - e[1] * (w[0] - a[0])
        if cr != 0:
            continue
        t = ex.dot(ex.sub(w, a), e)
        if 0 <= t <= ex.norm_sq(e):
            n = (-float(e[1]), float(e[0]))
            ln = math.hypot(*n)
            normals.append((n[0] / ln, n[1] / ln))
    if not normals:
        return None
    s = (sum(n[0] for n in normals), sum(n[1] for n in normals))
    ls = math.hypot(*s)
    return (s[0] / ls, s[1] / ls)


def _step_towards(w, direction, length):
    """Snapped point about ``length`` from w along a float unit direction."""
    return tuple(ex.snap(float(wi) + float(length) * di, SNAP_BITS) for wi, di in zip(w, direction))


def _unit(v):
    n = math.sqrt(sum(float(c) ** 2 for c in v))
    return tuple(float(c) / n for c in v) if n > 0 else None


def _pull_target(K, R, w, eps_sq):
    """A point y in int K \\ R with |y-w| <= eps/3 and d(R, y) <= 2 eps/3, or None."""
    pull = float(ex.sqrt_lower(eps_sq / 9)) * (1 - 1e-6)
    p = project(R, w)
    candidates = [_inward_direction(K, w), _unit(ex.sub(K.centroid(), w))]
    for d in candidates + [None]:
        if d is None:
            # a third of the way towards the nearest point of R, exactly
            y = tuple((2 * a + b) / 3 for a, b in zip(w, p))
        else:
            y = _step_towards(w, d, pull)
        if ex.norm_sq(ex.sub(y, w)) > eps_sq / 9:
            continue
        if point_sq_distance(R, y) > 4 * eps_sq / 9:
            continue
        if not in_relative_interior(K, y) or contains(R, y):
            continue
        return y
    return None


def _outer_points(R, delta):
    c = R.centroid()
    r_sq = max(ex.norm_sq(ex.sub(v, c)) for v in R.vertices)
    s = delta / (2 * ex.sqrt_upper(r_sq, 40))
    return [tuple(ex.snap(x, SNAP_BITS) for x in ex.add(v, ex.scale(s, ex.sub(v, c))))
            for v in R.vertices]


def _choose_delta(R, K, eps_sq):
    delta = ex.sqrt_lower(eps_sq / 100, 40)
    margin = _margin_sq(R, K)
    while delta * delta >= margin:
        delta /= 2
    return delta


# -- potentials around periodic orbits --------------------------------------

def _orbit_windows(cycle, m):
    return {cycle.periodic_prefix(m, j) for j in range(cycle.period)}


def _disjoint_depth(cycles, start):
    m = max(start, max(c.period for c in cycles))
    while True:
        seen = {}
        ok = True
        for i, c in enumerate(cycles):
            for w in _orbit_windows(c, m):
                if seen.setdefault(w, i) != i:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return m
        m += 1


def _pin_orbits(base, cycles, values, m, rank_cap=None):
    """``base`` lifted to rank m with value values[i] on the orbit cylinders of cycles[i]."""
    P = base.lift(m, rank_cap=rank_cap)
    vals = P.values.copy()
    vals.setflags(write=True)
    sft = base.sft
    for c, y in zip(cycles, values):
        for w in _orbit_windows(c, m):
            vals[sft.word_index(w)] = y
    return LocallyConstantPotential(sft, m, vals)


def _indicator_shift(F, cycle, vec, m):
    sft = F.sft
    P = LocallyConstantPotential.constant(sft, tuple(0 * c for c in vec)).lift(m)
    vals = P.values.copy()
    vals.setflags(write=True)
    for w in _orbit_windows(cycle, m):
        vals[sft.word_index(w)] = vec
    return LocallyConstantPotential(sft, m, vals)


# -- pinning, contraction, adjustment ------------------------------------------

def enlarge_potential(F, K, pairs, representative=None, limits=DEFAULT_LIMITS, _R=None):
    """Pin periodic orbits of F to targets y_i, keeping the rotation set inside K.

    ``pairs`` is a list of ``((z_i, cycle_i), y_i)``; z_i must be the average
    of F over cycle_i.  ``representative`` may be any potential
    cohomologous to F (same rotation set); it is the one whose Birkhoff
    averages are used, and F only receives the difference.

    Returns ``(G, G_tilde, info)`` when called through the internal path;
    the public form returns G.
    """
    zs = [tuple(z) for (z, _), _ in pairs]
    if len(set(zs)) != len(zs):
        raise PreconditionError("periodic points z_i must be distinct")
    G, _, _ = _enlarge(F, K, pairs, representative, limits, _R)
    return G


def _enlarge(F, K, pairs, Fhat, limits, R=None, keep=None):
    """Core of enlarge_potential.

    ``keep`` lists ``(vertex, cycle)`` witnesses of R(F) whose orbits stay
    unpinned; with it the hull condition relaxes to
    R(F) <= conv(targets and kept vertices), which still gives nesting
    because an untouched orbit keeps its average.
    """
    Fhat = F if Fhat is None else Fhat
    R = rotation_polytope(Fhat) if R is None else R
    keep = keep or []
    if R.is_singleton:
        raise SingletonRotationSet("enlarge_potential needs #R(F) >= 2")
    if not body_in_relint(R, K) or not K.full_dimensional:
        raise PreconditionError("R(F) must lie in the interior of a full-dimensional K")
    cycles = [c for (_, c), _ in pairs]
    zs = [tuple(z) for (z, _), _ in pairs]
    ys = [tuple(y) for _, y in pairs]
    if len(set(cycles + [c for _, c in keep])) != len(cycles) + len(keep):
        raise PreconditionError("witness cycles must be distinct")
    if len(set(ys)) != len(ys):
        raise PreconditionError("targets must be distinct")
    for y in ys:
        if contains(R, y) or not in_relative_interior(K, y):
            raise PreconditionError(f"target {y} must lie in int(K) \\ R(F)")
    hull_y = convex_hull(ys)
    if not body_subset(R, convex_hull(ys + [v for v, _ in keep])):
        raise TargetsNotContaining("R(F) is not contained in conv{y_i}")
    for z, c in zip(zs, cycles):
        if cycle_average(Fhat, c) != z:
            raise PreconditionError(f"z={z} is not the average over cycle {c}")

    # Mane radius: B_eps(R) inside int K and avoiding every target
    eps_sq = min([_margin_sq(R, K)] + [point_sq_distance(R, y) for y in ys])
    rank_cap = limits.rank_cap or default_rank_cap(F.sft)
    # B_eps(R) is convex, so once Im(Fhat) lies inside every average does
    image_inside = all(point_sq_distance(R, v) < eps_sq for v in Fhat.image())
    n, Fn = None, None
    for cand in range(1, limits.mane_n_max + 1):
        if Fhat.rank + cand - 1 > rank_cap:
            break
        if not all(_diameter_ok_at(Fhat, c, y, z, cand) for c, y, z in zip(cycles, ys, zs)):
            continue
        avg = birkhoff_average(Fhat, cand, rank_cap=rank_cap)
        if image_inside or all(point_sq_distance(R, v) < eps_sq for v in avg.image()):
            n, Fn = cand, avg
            break
    if n is None:
        raise RankOverflow("no admissible Mane time within the rank cap; "
                           "reduce witness periods or raise the rank cap")
    m = _disjoint_depth(cycles + [c for _, c in keep], Fn.rank)
    if m > rank_cap:
        raise RankOverflow(f"orbit cylinders need depth {m} beyond the rank cap {rank_cap}")
    G_tilde = _pin_orbits(Fn, cycles, ys, m, rank_cap)
    G = F + (G_tilde - Fn)
    RG = rotation_polytope(G_tilde)
    if not body_subset(hull_y, RG):
        raise CertificateFailure("conv{y_i} is not inside R(G)")
    if not body_in_relint(RG, K):
        raise CertificateFailure("R(G) is not inside int(K)")
    bound = PIN_FACTOR ** 2 * max(ex.norm_sq(ex.sub(z, y)) for z, y in zip(zs, ys))
    step_sq = sup_distance_sq(G, F)
    if step_sq > bound:
        raise CertificateFailure("|G-F| exceeds 7/6 max|z_i-y_i|")
    return G, G_tilde, {"n": n, "m": m, "R_G": RG, "step_sq": step_sq}


def split_singleton(F, K, representative=None, limits=DEFAULT_LIMITS):
    """Perturb F near one of two disjoint periodic orbits so R(F') is a segment."""
    G, _, _ = _split(F, K, representative, limits)
    return G


def _split(F, K, Fhat, limits, R=None):
    Fhat = F if Fhat is None else Fhat
    R = rotation_polytope(Fhat) if R is None else R
    if not R.is_singleton:
        raise PreconditionError("split_singleton needs a singleton rotation set")
    v = R.vertices[0]
    if not in_relative_interior(K, v) or not K.full_dimensional:
        raise PreconditionError("R(F) must lie in the interior of a full-dimensional K")
    eps_sq = hausdorff_distance_sq(R, K)
    c1, c2 = enumerate_cycles(F.sft, F.sft.alphabet_size)[:2]
    m = _disjoint_depth([c1, c2], Fhat.rank)
    direction = _unit(ex.sub(K.centroid(), v)) or (1.0,) + (0.0,) * (K.dim - 1)
    length = float(ex.sqrt_lower(eps_sq)) / 100 * (1 - 1e-6)
    while True:
        q = tuple(ex.snap(length * d, SNAP_BITS) for d in direction)
        if any(x != 0 for x in q) and ex.norm_sq(q) <= eps_sq / 10000 \
                and in_relative_interior(K, ex.add(v, q)):
            break
        length /= 2
    P = _indicator_shift(F, c1, q, m)
    G, G_hat = F + P, Fhat + P
    RG = rotation_polytope(G_hat)
    expected = convex_hull([v, ex.add(v, q)])
    checks = {
        "two orbit averages differ": RG == expected,
        "R(F') inside int K": body_in_relint(RG, K),
        "|F-F'| <= 0.01 eps": sup_distance_sq(G, F) <= eps_sq / 10000,
        "d_H(R(F'),K) <= 1.01 eps": hausdorff_distance_sq(RG, K) <= Fraction(101, 100) ** 2 * eps_sq,
    }
    for name, ok in checks.items():
        if not ok:
            raise CertificateFailure(f"split_singleton: {name}")
    return G, G_hat, {"cycles": (c1, c2), "shift": q, "R_G": RG}


def _orbit_averages(F, cycle, n):
    """Values of F^(n)/n along the orbit of cycle, without building the table."""
    vals = orbit_values(F, cycle)
    p = len(vals)
    out = []
    for j in range(p):
        total = vals[j]
        for k in range(1, n):
            total = ex.add(total, vals[(j + k) % p])
        out.append(tuple(c / n for c in total) if n > 1 else total)
    return out


def _diameter_ok_at(F, cycle, y, z, n):
    """diam conv(F^(n)/n on the orbit of cycle, y) <= 7/6 |y - z|, squared and exact."""
    pts = list(dict.fromkeys(_orbit_averages(F, cycle, n))) + [y]
    bound = PIN_FACTOR ** 2 * ex.norm_sq(ex.sub(y, z))
    return all(ex.norm_sq(ex.sub(a, b)) <= bound
               for i, a in enumerate(pts) for b in pts[i + 1:])


class _Candidates:
    """Cycles able to serve each target, cached per Birkhoff time n.

    A cycle can serve y when its average z is within 4 eps/5 of y and the
    orbit diameter condition holds for F^(n)/n.
    """

    def __init__(self, F_hat, R, targets, eps_sq, pool):
        self.F_hat, self.targets, self.eps_sq = F_hat, targets, eps_sq
        limit = Fraction(16, 25) * eps_sq
        self.near = []
        for y in targets:
            near = []
            for z, c in pool:
                d = ex.norm_sq(ex.sub(z, y))
                if d <= limit:
                    near.append((z, c, d))
            self.near.append(near)
        self.weights = [1 + float(point_sq_distance(R, y) / eps_sq) for y in targets]
        self.pool = pool
        self.index = {c: j for j, (_, c) in enumerate(pool)}
        self._by_n = {}

    def cost(self, n):
        if n not in self._by_n:
            big = np.inf
            cost = np.full((len(self.targets), len(self.pool)), big)
            for i, y in enumerate(self.targets):
                for z, c, d in self.near[i]:
                    if _diameter_ok_at(self.F_hat, c, y, z, n):
                        cost[i, self.index[c]] = (-100 * self.weights[i] + c.period / 100
                                                  + float(d / self.eps_sq) / 1000)
            self._by_n[n] = cost
        return self._by_n[n]


def _select_pairs(cands, witnesses, n, m):
    """Serve as many targets as possible with cycles whose m-windows are disjoint.

    An optimal assignment (favouring targets far from R(F), then short
    periods) is repaired greedily: a target whose cycle shares an m-window
    with an already accepted one falls back to its next candidate.  Vertex
    witnesses that stay window-disjoint are returned as kept.
    Returns (pairs, keep, unserved).
    """
    cost = cands.cost(n)
    finite = np.isfinite(cost)
    solvable = np.where(finite, cost, 1e9)
    rows, cols = linear_sum_assignment(solvable)
    first = dict(zip(rows, cols))
    order = sorted(range(len(cands.targets)), key=lambda i: -cands.weights[i])
    taken, used, pairs, unserved = set(), set(), [], []
    for i in order:
        options = [first[i]] if i in first and finite[i, first[i]] else []
        options += [j for j in np.argsort(cost[i]) if finite[i, j] and j not in options]
        for j in options:
            z, c = cands.pool[j]
            w = _orbit_windows(c, m)
            if c in used or w & taken:
                continue
            used.add(c)
            taken |= w
            pairs.append(((z, c), cands.targets[i]))
            break
        else:
            unserved.append(cands.targets[i])
    keep = []
    for v, c in witnesses.items():
        if c in used:
            continue
        w = _orbit_windows(c, m)
        if not w & taken:
            keep.append((v, c))
            taken |= w
    return pairs, keep, unserved


def contraction_step(F, K, limits=DEFAULT_LIMITS):
    """One contraction: R(F) <= R(G) <= int K, |G-F| <= kappa eps, d_H(R(G),K) <= kappa eps."""
    frame = affine_hull(K)
    if frame.dim == K.dim:
        G, _, _ = _contract(F, F, K, limits)
        return G
    Fr, N = _reduce_potential(F, frame)
    Gr, _, _ = _contract(Fr, Fr, frame.reduce_body(K), limits)
    return _embed_potential(Gr, frame) + N


def _contract(F, Fhat, K, limits, R=None):
    R = rotation_polytope(Fhat) if R is None else R
    if not body_in_relint(R, K):
        raise PreconditionError("R(F) must lie in the interior of K")
    eps_sq = hausdorff_distance_sq(R, K)
    F0 = F
    split = False
    if R.is_singleton:
        F, Fhat, info = _split(F, K, Fhat, limits, R)
        R = info["R_G"]
        split = True
    work_eps_sq = hausdorff_distance_sq(R, K)
    delta = _choose_delta(R, K, work_eps_sq)
    outer = _outer_points(R, delta)
    r = ex.sqrt_lower(work_eps_sq / 16, 40)
    net = boundary_net(K, r)
    targets = []
    for w in net:
        y = _pull_target(K, R, w, work_eps_sq)
        if y is not None:
            targets.append(y)
    all_y = sorted(set(outer + targets))
    hull_y = convex_hull(all_y)
    kept = list(hull_y.vertices)
    # shallowest cylinder depth m, then least Birkhoff time n, whose served
    # targets already give the bounds; unserved targets are dropped
    rank_cap = limits.rank_cap or default_rank_cap(F.sft)
    pool = [(z, c) for z, cs in periodic_rotation_points(Fhat, limits.max_period) for c in cs]
    cands = _Candidates(Fhat, R, kept, work_eps_sq, pool)
    found = False
    # first look for a decisive step, then settle for the guaranteed ratio
    for goal_sq in (GOAL_RATIO ** 2 * eps_sq, KAPPA ** 2 * eps_sq):
        for m in range(Fhat.rank, rank_cap + 1):
            for n in range(1, min(limits.mane_n_max, m - Fhat.rank + 1) + 1):
                pairs, keep, _ = _select_pairs(cands, R.witnesses, n, m)
                pairs, keep = _trim_pairs(R, K, pairs, keep, goal_sq)
                if pairs:
                    found = True
                    break
            if found:
                break
        if found:
            break
    if not found:
        raise NoPeriodicPointClose(
            f"no selection of periodic points within 4eps/5 (period <= "
            f"{limits.max_period}, depth <= {rank_cap}) meets the step bounds")
    G, G_hat, info = _enlarge(F, K, pairs, Fhat, limits, R, keep)
    RG = info["R_G"]
    new_eps_sq = hausdorff_distance_sq(RG, K)
    step_sq = sup_distance_sq(G, F0)
    record = StepRecord(
        iteration=0, eps_sq=eps_sq, new_eps_sq=new_eps_sq, step_sq=step_sq,
        rank=G.rank, mane_n=info["n"], depth=info["m"], split=split,
        nested=body_subset(R, RG), inside=body_in_relint(RG, K),
        z_points=[z for (z, _), _ in pairs], y_points=[y for _, y in pairs], w_points=net,
        cycles=[str(c) for (_, c), _ in pairs], rotation_vertices=list(RG.vertices))
    k2 = KAPPA ** 2
    if not (record.nested and record.inside and step_sq <= k2 * eps_sq
            and new_eps_sq <= k2 * eps_sq):
        raise CertificateFailure("contraction step conclusions failed")
    return G, G_hat, record


def _trim_pairs(R, K, pairs, keep, goal_sq):
    """Drop the least useful pairs until the prediction holds.

    A pinned vertex witness that moves only slightly can cut its old vertex
    off the new hull; releasing it back to the kept witnesses fixes that.
    """
    pairs, keep = list(pairs), list(keep)
    witnesses = {c: v for v, c in R.witnesses.items()}
    while pairs:
        if _prediction_ok(R, K, [y for _, y in pairs], keep, goal_sq):
            return pairs, keep
        i = min(range(len(pairs)), key=lambda k: point_sq_distance(R, pairs[k][1]))
        (_, c), _ = pairs.pop(i)
        if c in witnesses:
            keep.append((witnesses[c], c))
    return [], keep


def _prediction_ok(R, K, served, keep, goal_sq):
    """Nesting and d_H(conv(targets, R), K)^2 <= goal_sq before building G."""
    if not body_subset(R, convex_hull(served + [v for v, _ in keep])):
        return False
    return hausdorff_distance_sq(convex_hull(served + list(R.vertices)), K) <= goal_sq


# -- affine reduction -------------------------------------------------------

def _reduce_potential(F, frame):
    """Coordinates of F in the frame, plus the normal part N = F - embed(reduce F)."""
    Fr = F.map_values(frame.reduce)
    N = F - _embed_potential(Fr, frame)
    return Fr, N


def _embed_potential(Fr, frame):
    if frame.dim == 0:
        return LocallyConstantPotential.constant(Fr.sft, frame.origin).lift(Fr.rank)
    return Fr.map_values(frame.embed)


def realize_interior(F, K, tol, limits=DEFAULT_LIMITS, representative=None):
    """Iterate contraction steps until d_H(R(F_n), K) <= tol.

    Returns ``(G, trace)``.  When K has empty interior the iteration runs
    in coordinates on the affine hull of K.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    tol_sq = ex.as_fraction(tol) ** 2
    frame = affine_hull(K)
    Fhat = F if representative is None else representative
    trace = RealizationTrace()
    if frame.dim == 0:
        R = rotation_polytope(Fhat)
        if R != K:
            raise PreconditionError("R(F) must lie in relint(K) = K for a singleton K")
        return F, trace
    reduced = frame.dim < K.dim
    if reduced:
        Fw, N = _reduce_potential(F, frame)
        Fhw, _ = _reduce_potential(Fhat, frame)
        Kw = frame.reduce_body(K)
    else:
        Fw, Fhw, Kw, N = F, Fhat, K, None
    scale_sq = frame.scale_sq
    R = rotation_polytope(Fhw)
    if not body_in_relint(R, Kw):
        raise PreconditionError("R(F) must lie in relint(K)")
    eps_sq = hausdorff_distance_sq(R, Kw)
    trace.eps0_sq = eps_sq * scale_sq
    cap = _iteration_cap(trace.eps0_sq, tol_sq, limits)
    cumulative = Fraction(0)
    t = 0
    while eps_sq * scale_sq > tol_sq:
        if t >= cap:
            raise IterationCap(f"no convergence within {cap} iterations", trace)
        try:
            G, G_hat, rec = _contract(Fw, Fhw, Kw, limits, R)
        except RankOverflow as exc:
            raise RankOverflow(f"{exc} (after {t} iterations)") from exc
        t += 1
        rec.iteration = t
        rec.eps_sq *= scale_sq
        rec.new_eps_sq *= scale_sq
        rec.step_sq *= scale_sq
        cumulative += ex.sqrt_upper(rec.step_sq)
        rec.cumulative_upper = cumulative
        if reduced:
            rec.z_points = [frame.embed(z) for z in rec.z_points]
            rec.y_points = [frame.embed(y) for y in rec.y_points]
            rec.w_points = [frame.embed(w) for w in rec.w_points]
            rec.rotation_vertices = [frame.embed(v) for v in rec.rotation_vertices]
        trace.records.append(rec)
        Fw, Fhw = G, G_hat
        R = rotation_polytope(Fhw)
        eps_sq = rec.new_eps_sq / scale_sq
    G = _embed_potential(Fw, frame) + N if reduced else Fw
    return G, trace


def _iteration_cap(eps0_sq, tol_sq, limits):
    if eps0_sq <= tol_sq:
        return 0
    ratio = math.log(math.sqrt(float(tol_sq) / float(eps0_sq))) / math.log(float(KAPPA))
    return math.ceil(ratio) + limits.iteration_margin


def adjust_into_interior(F, K, eps, limits=DEFAULT_LIMITS):
    """Return (F', F'') with R(F') in relint K, |F-F'| <= 2 eps, Im F'' in aff(K)."""
    Fp, Fpp, _ = _adjust(F, K, eps, limits)
    return Fp, Fpp


def _adjust(F, K, eps, limits, R=None):
    eps = ex.as_fraction(eps)
    R = rotation_polytope(F) if R is None else R
    if hausdorff_distance_sq(R, K) > eps * eps:
        raise PreconditionError("d_H(R(F), K) must be <= eps")
    rank_cap = limits.rank_cap or default_rank_cap(F.sft)
    n = None
    for cand in range(1, limits.mane_n_max + 1):
        Fn = birkhoff_average(F, cand, rank_cap=rank_cap)
        if all(point_sq_distance(R, v) < eps * eps for v in Fn.image()):
            n = cand
            break
    if n is None:
        raise RankOverflow("Mane time exceeds the configured search range")
    delta = min(eps, Fraction(1, 2))
    L = shrink(K, delta) if delta < 1 else shrink(K, Fraction(1, 2))
    frame = affine_hull(K)
    Fpp = Fn.map_values(lambda v: _snap_into(K, frame, project(L, v)))
    Fp = Fpp + (F - Fn) if n > 1 else Fpp
    Rpp = rotation_polytope(Fpp)
    checks = {
        "adjust: R(F') in relint K": (body_in_relint(Rpp, K), ""),
        "adjust: |F-F'| <= 2 eps": (sup_distance_sq(F, Fp) <= 4 * eps * eps,
                                    f"{math.sqrt(sup_distance_sq(F, Fp)):.6g} <= {2 * float(eps):.6g}"),
        "adjust: d_H(K,R(F'')) <= 4 eps": (hausdorff_distance_sq(K, Rpp) <= 16 * eps * eps,
                                           f"{math.sqrt(hausdorff_distance_sq(K, Rpp)):.6g}"),
        "adjust: Im(F'') in aff(K)": (all(frame.contains(v) for v in Fpp.image()), ""),
    }
    for name, (ok, _) in checks.items():
        if not ok:
            raise CertificateFailure(name)
    return Fp, Fpp, {"n": n, "L": L, "R_pp": Rpp, "checks": checks}


def _snap_into(K, frame, p):
    """p moved to the dyadic grid of its affine coordinates when that keeps it in relint K.

    Exact projections carry large denominators that slow every later
    rational computation down; the 2 eps budget easily absorbs 2**-40.
    """
    if frame.dim == 0:
        return p
    q = frame.embed(ex.snap_vector(frame.reduce(p), SNAP_BITS))
    return q if in_relative_interior(K, q) else p


def realize(F, K, tol, limits=DEFAULT_LIMITS):
    """G with d_H(R(G), K) <= tol and |F-G| <= 122 d_H(R(F), K).

    Returns ``(G, trace)``.  The trace certificate covers both phases.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if F.dim != K.dim:
        raise PreconditionError("potential and body dimensions differ")
    F = F.to_exact()
    tol_sq = ex.as_fraction(tol) ** 2
    R = rotation_polytope(F)
    eps_sq = hausdorff_distance_sq(R, K)
    if eps_sq <= tol_sq:
        trace = RealizationTrace(eps0_sq=eps_sq)
        trace.final["final d_H <= tol"] = (True, f"{math.sqrt(eps_sq):.6g}")
        return F, trace
    eps = ex.sqrt_upper(eps_sq, 64)
    Fp, Fpp, info = _adjust(F, K, eps, limits, R)
    G_tilde, trace = realize_interior(Fpp, K, tol, limits)
    G = G_tilde + (Fp - Fpp) if Fp is not Fpp else G_tilde
    trace.adjust = info["checks"]
    trace.adjust["adjust: Mane time"] = (True, str(info["n"]))
    R_final = rotation_polytope(G_tilde)
    coboundary = rotation_polytope(Fp - Fpp)
    zero = tuple(Fraction(0) for _ in range(F.dim))
    d_sq = hausdorff_distance_sq(R_final, K)
    move_sq = sup_distance_sq(F, G)
    trace.final["F'-F'' is a coboundary"] = (coboundary.vertices == (zero,), "")
    trace.final["final d_H <= tol"] = (d_sq <= tol_sq, f"{math.sqrt(d_sq):.6g} <= {float(tol):.6g}")
    trace.final["|F-G| <= (2+4C) eps"] = (
        move_sq <= OPENNESS_FACTOR ** 2 * eps_sq,
        f"{math.sqrt(move_sq):.6g} <= {OPENNESS_FACTOR * math.sqrt(eps_sq):.6g}")
    trace.final["R(G) = R(G~)"] = (True, "G - G~ = F' - F'' is a coboundary")
    return G, trace
