"""Boundary diagnostics and the experiments built on them.

Angles are reported in floats; every containment or nesting claim is
decided on exact rational vertices.
"""
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact as ex
from .errors import DegenerateBody, PerturbationTooLarge, PreconditionError
from .geometry import body_subset, convex_hull, hausdorff_distance_sq
from .potential import LocallyConstantPotential, circle_potential, orbit_values
from .rotation import rotation_polytope
from .shift import DEFAULT_CYCLE_BUDGET, enumerate_cycles, full_shift

PERSISTENCE_RATIO = 0.9
DISK_SLACK = Fraction(1, 2 ** 50)


@dataclass
class BoundaryReport:
    body: object
    exterior_angles: list
    corners: list
    max_angle: float
    threshold: float
    edge_lengths: list = field(default_factory=list)

    @property
    def angle_sum(self):
        return math.fsum(self.exterior_angles)

    def angle_at(self, point, radius=0.0):
        """Total turning of the vertices within ``radius`` of ``point``."""
        p = tuple(float(c) for c in point)
        return math.fsum(a for v, a in zip(self.body.vertices, self.exterior_angles)
                         if math.dist(p, tuple(float(c) for c in v)) <= radius)

    def to_json(self):
        lengths = self.edge_lengths
        return {
            "body": self.body.to_json(),
            "exterior_angles": self.exterior_angles,
            "corners": [[float(c) for c in v] for v in self.corners],
            "max_angle": self.max_angle,
            "threshold": self.threshold,
            "angle_sum": self.angle_sum,
            "edge_length": {
                "min": min(lengths) if lengths else None,
                "max": max(lengths) if lengths else None,
                "mean": statistics.fmean(lengths) if lengths else None,
            },
        }


def exterior_angles(K):
    """Turning angle at each vertex of a planar polygon (pi at segment ends)."""
    vs = [tuple(float(c) for c in v) for v in K.vertices]
    if K.dim != 2:
        raise DegenerateBody("exterior angles are defined for planar bodies")
    if len(vs) == 1:
        return [2 * math.pi]
    if len(vs) == 2:
        return [math.pi, math.pi]
    out = []
    n = len(vs)
    for i in range(n):
        a, b, c = vs[i - 1], vs[i], vs[(i + 1) % n]
        u = (b[0] - a[0], b[1] - a[1])
        w = (c[0] - b[0], c[1] - b[1])
        out.append(math.atan2(u[0] * w[1] - u[1] * w[0], u[0] * w[0] + u[1] * w[1]))
    return out


def detect_corners(K, angle_threshold):
    """Vertices whose exterior angle is at least ``angle_threshold``.

    Raises DegenerateBody for points and segments; the exception carries
    an empty report in its ``report`` attribute.
    """
    if K.dim != 2 or not K.full_dimensional:
        err = DegenerateBody("corner detection needs a planar body with interior")
        err.report = BoundaryReport(K, [], [], 0.0, angle_threshold)
        raise err
    angles = exterior_angles(K)
    corners = [v for v, a in zip(K.vertices, angles) if a >= angle_threshold]
    lengths = [math.dist(tuple(map(float, a)), tuple(map(float, b))) for a, b in K.edges()]
    return BoundaryReport(K, angles, corners, max(angles), angle_threshold, lengths)


# -- the fish ---------------------------------------------------------------

def _exact_average(F, cycle):
    vals = orbit_values(F, cycle)
    tot = [Fraction(0)] * F.dim
    for v in vals:
        tot = [t + Fraction(float(c)) for t, c in zip(tot, v)]
    return tuple(t / len(vals) for t in tot)


def fish_points(max_period, depth, midpoint=True, budget=DEFAULT_CYCLE_BUDGET, potential=None):
    """Exact orbit averages of the depth-truncated circle potential."""
    if max_period < 1 or depth < 1:
        raise PreconditionError("max_period and depth must be positive")
    F = potential or circle_potential(depth, midpoint=midpoint)
    return {c: _exact_average(F, c) for c in enumerate_cycles(F.sft, max_period, budget=budget)}


def fish(max_period, depth, angle_threshold=0.3, midpoint=True, budget=DEFAULT_CYCLE_BUDGET):
    """Hull of the periodic averages of (cos 2 pi x, sin 2 pi x) under doubling.

    Values are taken at the midpoints of the depth-cylinders by default,
    which makes the hull exactly symmetric under (x, y) -> (x, -y); the two
    fixed points then sit within 2 pi 2**-(depth+1) of (1, 0).
    """
    pts = fish_points(max_period, depth, midpoint, budget)
    witnesses = {}
    for c, p in pts.items():
        witnesses.setdefault(p, c)
    hull = convex_hull(list(witnesses))
    hull = type(hull)(hull.dim, hull.vertices, {v: witnesses[v] for v in hull.vertices})
    if hull.full_dimensional:
        return hull, detect_corners(hull, angle_threshold)
    return hull, BoundaryReport(hull, exterior_angles(hull), [], math.pi, angle_threshold)


def fish_series(periods, depth, angle_threshold=0.3, midpoint=True):
    """Fish hulls for growing periods with nesting, symmetry and the corner at (1, 0)."""
    periods = sorted(periods)
    F = circle_potential(depth, midpoint=midpoint)
    pts = fish_points(periods[-1], depth, potential=F)
    radius = 4 * math.pi * 2.0 ** -depth
    rows, hulls = [], []
    for p in periods:
        hull = convex_hull(sorted({v for c, v in pts.items() if c.period <= p}))
        rep = detect_corners(hull, angle_threshold)
        mirror = convex_hull([(x, -y) for x, y in hull.vertices])
        rows.append({
            "max_period": p,
            "vertices": len(hull.vertices),
            # table entries are rounded unit vectors, so allow their rounding
            "in_unit_disk": all(ex.norm_sq(v) <= 1 + DISK_SLACK for v in hull.vertices),
            "max_norm": math.sqrt(max(float(ex.norm_sq(v)) for v in hull.vertices)),
            "symmetry_gap": math.sqrt(float(hausdorff_distance_sq(hull, mirror))),
            "corner_angle": rep.angle_at((1, 0), radius),
            "max_angle": rep.max_angle,
        })
        hulls.append(hull)
    nested = all(body_subset(a, b) for a, b in zip(hulls, hulls[1:]))
    angles = [r["corner_angle"] for r in rows]
    return {
        "depth": depth,
        "rows": rows,
        "nested": nested,
        # refinement may shave a little off the angle, but not drive it to zero
        "corner_persists": all(a >= angle_threshold for a in angles)
                           and angles[-1] >= PERSISTENCE_RATIO * angles[0],
    }, hulls


# -- the cone at a fixed point ---------------------------------------------

def distance_potential(sft, depth, fixed_symbol=0):
    """(0, -2 d(x, x0)) with x0 the fixed point of ``fixed_symbol``, cut at depth."""
    if not sft.transitions[fixed_symbol][fixed_symbol]:
        raise PreconditionError(f"symbol {fixed_symbol} is not a fixed point of the shift")

    def value(w):
        k = 0
        while k < len(w) and w[k] == fixed_symbol:
            k += 1
        return (Fraction(0), Fraction(0) if k == len(w) else Fraction(-2, 2 ** k))

    return LocallyConstantPotential.from_function(sft, depth, value, 2)


def lipschitz_constant(G):
    """max |G(w) - G(w')| / 2**-k over words first differing at index k."""
    sft, r = G.sft, G.rank
    words = sft.allowed_words(r)
    vals = np.array([[float(c) for c in G.values[sft.word_index(w)]] for w in words])
    best = 0.0
    for k in range(r):
        groups = {}
        for i, w in enumerate(words):
            groups.setdefault(w[:k], {}).setdefault(w[k], []).append(i)
        for children in groups.values():
            keys = sorted(children)
            for a_i, a in enumerate(keys):
                for b in keys[a_i + 1:]:
                    A, B = vals[children[a]], vals[children[b]]
                    d = np.sqrt(((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)).max()
                    best = max(best, float(d) * 2.0 ** k)
    return best


def random_cone_perturbation(sft, rank, rng, fixed_symbol=0):
    """A rank-r perturbation with Lipschitz constant below 2/5 vanishing at x0.

    Built as a sum of prefix terms a_j(w_0..w_j) with |a_j| <= 2**-j / 10.
    """
    terms = [{} for _ in range(rank)]

    def value(w):
        tot = [Fraction(0), Fraction(0)]
        for j in range(rank):
            key = w[:j + 1]
            if key not in terms[j]:
                ang = rng.uniform(0, 2 * math.pi)
                rad = rng.uniform(0, 0.1) * 2.0 ** -j
                terms[j][key] = (ex.snap(rad * math.cos(ang), 40), ex.snap(rad * math.sin(ang), 40))
            tot = [t + c for t, c in zip(tot, terms[j][key])]
        return tuple(tot)

    G = LocallyConstantPotential.from_function(sft, rank, value, 2)
    base = G.values[sft.word_index((fixed_symbol,) * rank)]
    return G - LocallyConstantPotential.constant(sft, tuple(base)).lift(rank)


def cone_experiment(sft, perturbation, approx_depth, fixed_symbol=0, angle_threshold=math.pi / 2):
    """R(F + G) for F = (0, -2 d(x, x0)): apex at (0, 0) and cone containment.

    Containment y <= -|x| is checked exactly on vertices.
    """
    G = perturbation
    if G.rank > approx_depth:
        raise PreconditionError("approx_depth must be at least the perturbation rank")
    apex = G.values[sft.word_index((fixed_symbol,) * G.rank)]
    if any(c != 0 for c in apex):
        raise PreconditionError("the perturbation must vanish on the fixed-point cylinder")
    lip = lipschitz_constant(G)
    sup = math.sqrt(max(sum(float(c) ** 2 for c in row) for row in G.allowed_values()))
    if lip >= 0.5 or sup >= 0.5:
        raise PerturbationTooLarge(f"Lipschitz constant {lip:.4g}, sup norm {sup:.4g}; both must be < 1/2")
    F = distance_potential(sft, approx_depth, fixed_symbol)
    R = rotation_polytope(F + G.to_exact().lift(approx_depth))
    origin = (Fraction(0), Fraction(0))
    in_cone = [v[1] <= -abs(v[0]) for v in R.vertices]
    angles = exterior_angles(R)
    apex_angle = next((a for v, a in zip(R.vertices, angles) if v == origin), 0.0)
    return {
        "vertices": [[float(c) for c in v] for v in R.vertices],
        "lipschitz": lip,
        "sup_norm": sup,
        "origin_is_vertex": origin in R.vertices,
        "cone_contains": all(in_cone),
        "apex_angle": apex_angle,
        "corner_at_origin": origin in R.vertices and apex_angle >= angle_threshold,
        "body": R,
    }


# -- genericity probe -------------------------------------------------------

def genericity_probe(sample_count, ranks, seed, sft=None):
    """Vertex counts and largest exterior angles of random exact polytopes.

    Entries are uniform in [-1, 1]^2, drawn per (seed, rank, sample) and
    snapped to the 2**-30 grid, so the report depends only on the seed.
    Descriptive only.
    """
    sft = sft or full_shift(2)
    ranks = [ranks] if isinstance(ranks, int) else list(ranks)
    out = {"seed": seed, "sample_count": sample_count, "ranks": {}}
    for r in ranks:
        counts, maxima = [], []
        for i in range(sample_count):
            rng = np.random.default_rng([seed, r, i])
            table = rng.uniform(-1, 1, size=(sft.alphabet_size ** r, 2))
            F = LocallyConstantPotential.from_function(
                sft, r, lambda w: ex.snap_vector(table[sft.word_index(w)]), 2)
            R = rotation_polytope(F)
            counts.append(len(R.vertices))
            maxima.append(max(exterior_angles(R)) if R.dim == 2 else math.pi)
        out["ranks"][str(r)] = {
            "vertex_counts": counts,
            "max_angles": maxima,
            "median_vertices": statistics.median(counts),
            "mean_vertices": statistics.fmean(counts),
            "median_max_angle": statistics.median(maxima),
        }
    return out
