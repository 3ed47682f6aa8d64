"""Convex bodies given by their vertices.

Everything in dimension 1 and 2 is computed with the arithmetic of the
inputs, so bodies with ``Fraction`` coordinates get exact hulls,
containment tests and squared distances.  Dimensions >= 3 fall back to
floating point through scipy and are never used for certified checks.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, sqrt

import numpy as np

from . import exact as ex
from .errors import DegenerateBody, DimensionMismatch, PreconditionError, ZeroDirection


@dataclass(frozen=True)
class ConvexBody:
    """A polytope stored as its minimal vertex list.

    In the plane the vertices run counter-clockwise starting from the
    lexicographically smallest one, so equal bodies have equal vertex
    tuples.  ``witnesses`` optionally maps vertices to the periodic cycles
    that realise them.
    """

    dim: int
    vertices: tuple
    witnesses: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    approximate: bool = field(default=False, compare=False)

    @property
    def exact(self):
        return ex.is_exact(self.vertices)

    @property
    def is_singleton(self):
        return len(self.vertices) == 1

    @property
    def affine_dim(self):
        n = len(self.vertices)
        if n == 1:
            return 0
        if self.dim <= 2:
            return min(n - 1, self.dim)
        pts = np.array(self.vertices, dtype=float)
        return int(np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-12))

    @property
    def full_dimensional(self):
        return self.affine_dim == self.dim

    def centroid(self):
        n = len(self.vertices)
        tot = self.vertices[0]
        for v in self.vertices[1:]:
            tot = ex.add(tot, v)
        if self.exact:
            return tuple(Fraction(c) / n for c in tot)
        return tuple(c / n for c in tot)

    def edges(self):
        vs = self.vertices
        if len(vs) < 3:
            return list(zip(vs, vs[1:]))
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def translated(self, v):
        return ConvexBody(self.dim, tuple(ex.add(p, v) for p in self.vertices))

    def to_json(self):
        def enc(c):
            return str(c) if isinstance(c, Fraction) and c.denominator != 1 else (
                int(c) if isinstance(c, Fraction) else float(c))
        return {"dim": self.dim, "vertices": [[enc(c) for c in v] for v in self.vertices]}


def body_from_json(obj, exact=True):
    pts = [ex.as_vector(v, exact) for v in obj["vertices"]]
    if not pts:
        raise PreconditionError("a body needs at least one vertex")
    dim = int(obj.get("dim", len(pts[0])))
    if any(len(p) != dim for p in pts):
        raise DimensionMismatch("vertex length does not match dim")
    return convex_hull(pts)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _normalise_points(points):
    pts = [tuple(p) for p in points]
    if not pts:
        raise PreconditionError("convex_hull needs at least one point")
    if not all(ex.is_exact(p) for p in pts):
        return [tuple(float(c) for c in p) for p in pts]
    return [ex.as_vector(p) for p in pts]


def convex_hull(points):
    pts = _normalise_points(points)
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DimensionMismatch("points have different dimensions")
    uniq = sorted(set(pts))
    if len(uniq) == 1:
        return ConvexBody(d, (uniq[0],))
    if d == 1:
        return ConvexBody(1, (uniq[0], uniq[-1]))
    if d == 2:
        return ConvexBody(2, _hull2d(uniq))
    return _hull_nd(uniq)


def _hull2d(uniq):
    lower = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 or _all_collinear(uniq):
        return (uniq[0], uniq[-1])
    return tuple(hull)


def _all_collinear(pts):
    a, b = pts[0], pts[-1]
    return all(_cross(a, b, p) == 0 for p in pts)


def _hull_nd(uniq):
    from scipy.spatial import ConvexHull
    arr = np.array(uniq, dtype=float)
    centred = arr - arr.mean(axis=0)
    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    rank = int((s > 1e-12 * max(1.0, s[0])).sum())
    d = arr.shape[1]
    if rank == 0:
        return ConvexBody(d, (uniq[0],), approximate=True)
    coords = centred @ vt[:rank].T
    if rank == 1:
        i, j = int(coords[:, 0].argmin()), int(coords[:, 0].argmax())
        return ConvexBody(d, tuple(sorted({uniq[i], uniq[j]})), approximate=True)
    hull = ConvexHull(coords)
    verts = tuple(sorted({uniq[i] for i in hull.vertices}))
    return ConvexBody(d, verts, approximate=True)


def support_function(K, u):
    """max over K of x.u and an attaining vertex (lexicographically least on ties)."""
    if all(c == 0 for c in u):
        raise ZeroDirection("support function needs a non-zero direction")
    best, arg = None, None
    for v in K.vertices:
        val = ex.dot(v, u)
        if best is None or val > best or (val == best and v < arg):
            best, arg = val, v
    return best, arg


def _seg_nearest(a, b, x):
    ab = ex.sub(b, a)
    den = ex.norm_sq(ab)
    t = ex.dot(ex.sub(x, a), ab) / den
    if t <= 0:
        p = a
    elif t >= 1:
        p = b
    else:
        p = ex.add(a, ex.scale(t, ab))
    return ex.norm_sq(ex.sub(x, p)), p


def _inside_polygon(K, x, strict=False):
    vs = K.vertices
    n = len(vs)
    for i in range(n):
        c = _cross(vs[i], vs[(i + 1) % n], x)
        if c < 0 or (strict and c == 0):
            return False
    return True


def _nearest(K, x):
    x = tuple(x)
    if len(x) != K.dim:
        raise DimensionMismatch(f"point of dim {len(x)} vs body of dim {K.dim}")
    vs = K.vertices
    if len(vs) == 1:
        return ex.norm_sq(ex.sub(x, vs[0])), vs[0]
    if K.dim == 1:
        lo, hi = vs[0][0], vs[1][0]
        p = (min(max(x[0], lo), hi),)
        return (x[0] - p[0]) ** 2, p
    if K.dim == 2:
        if len(vs) >= 3 and _inside_polygon(K, x):
            return 0 * x[0], x
        best = None
        for a, b in K.edges():
            cand = _seg_nearest(a, b, x)
            if best is None or cand[0] < best[0]:
                best = cand
        return best
    return _nearest_nd(K, x)


def _nearest_nd(K, x):
    from scipy.optimize import nnls
    V = np.array(K.vertices, dtype=float).T
    xv = np.array(x, dtype=float)
    w = 1e6
    A = np.vstack([V, w * np.ones(V.shape[1])])
    b = np.concatenate([xv, [w]])
    lam, _ = nnls(A, b)
    lam = lam / lam.sum()
    p = V @ lam
    return float(((xv - p) ** 2).sum()), tuple(float(c) for c in p)


def point_sq_distance(K, x):
    return _nearest(K, x)[0]


def point_body_distance(K, x):
    return ex.fsqrt(point_sq_distance(K, x))


def project(K, x):
    return _nearest(K, x)[1]


def contains(K, x):
    return point_sq_distance(K, x) == 0


def in_relative_interior(K, x):
    x = tuple(x)
    vs = K.vertices
    if len(vs) == 1:
        return x == vs[0]
    if K.dim == 1:
        return vs[0][0] < x[0] < vs[1][0]
    if K.dim == 2:
        if len(vs) == 2:
            a, b = vs
            if _cross(a, b, x) != 0:
                return False
            ab = ex.sub(b, a)
            t = ex.dot(ex.sub(x, a), ab)
            return 0 < t < ex.norm_sq(ab)
        return _inside_polygon(K, x, strict=True)
    frame = affine_hull(K)
    if ex.norm_sq(ex.sub(frame.embed(frame.reduce(x)), x)) > 1e-18:
        return False
    return in_relative_interior(frame.reduce_body(K), frame.reduce(x)) if frame.dim <= 2 else \
        _relint_nd(K, x)


def _relint_nd(K, x):
    from scipy.spatial import ConvexHull
    hull = ConvexHull(np.array(K.vertices, dtype=float))
    return bool(np.all(hull.equations[:, :-1] @ np.array(x, dtype=float) + hull.equations[:, -1] < -1e-12))


def body_subset(L, K):
    """L subset of K (vertex test suffices by convexity)."""
    return all(contains(K, v) for v in L.vertices)


def body_in_relint(L, K):
    return all(in_relative_interior(K, v) for v in L.vertices)


def hausdorff_distance_sq(K, L):
    if K.dim != L.dim:
        raise DimensionMismatch(f"bodies of dim {K.dim} and {L.dim}")
    a = max(point_sq_distance(L, v) for v in K.vertices)
    b = max(point_sq_distance(K, v) for v in L.vertices)
    return max(a, b)


def hausdorff_distance(K, L):
    return ex.fsqrt(hausdorff_distance_sq(K, L))


@dataclass(frozen=True)
class AffineFrame:
    """Coordinates on the affine hull of a body.

    ``basis`` rows are mutually orthogonal with common squared length
    ``scale_sq``; float frames are orthonormal, exact frames keep rational
    basis vectors so that reduction and embedding stay exact.  Distances
    measured in reduced coordinates equal ambient distances divided by
    ``sqrt(scale_sq)``.
    """

    origin: tuple
    basis: tuple
    scale_sq: object = 1

    @property
    def dim(self):
        return len(self.basis)

    def orthonormal_basis(self):
        return tuple(tuple(float(c) / sqrt(float(ex.norm_sq(b))) for c in b) for b in self.basis)

    def reduce(self, x):
        d = ex.sub(tuple(x), self.origin)
        return tuple(ex.dot(d, b) / ex.norm_sq(b) for b in self.basis)

    def embed(self, t):
        p = self.origin
        for ti, b in zip(t, self.basis):
            p = ex.add(p, ex.scale(ti, b))
        return p

    def contains(self, x):
        return ex.sub(self.embed(self.reduce(x)), tuple(x)) == tuple(0 * c for c in x)

    def reduce_body(self, K):
        return convex_hull([self.reduce(v) for v in K.vertices])

    def embed_body(self, K):
        return convex_hull([self.embed(v) for v in K.vertices])


def affine_hull(K):
    vs = K.vertices
    d = K.dim
    zero = tuple(0 * c for c in vs[0])
    if len(vs) == 1:
        return AffineFrame(vs[0], (), 1)
    ell = K.affine_dim
    if ell == d:
        one = Fraction(1) if K.exact else 1.0
        basis = tuple(tuple(one if i == j else 0 * one for j in range(d)) for i in range(d))
        return AffineFrame(zero, basis, one)
    if ell == 1:
        b = ex.sub(vs[-1], vs[0])
        if K.exact:
            return AffineFrame(vs[0], (b,), ex.norm_sq(b))
        n = sqrt(ex.norm_sq(b))
        return AffineFrame(vs[0], (tuple(c / n for c in b),), 1.0)
    pts = np.array(vs, dtype=float)
    _, _, vt = np.linalg.svd(pts - pts[0])
    return AffineFrame(tuple(float(c) for c in pts[0]),
                       tuple(tuple(float(c) for c in row) for row in vt[:ell]), 1.0)


def shrink(K, delta):
    """A body inside relint(K) at Hausdorff distance < delta from K.

    Scales the vertices about their centroid by 1 - delta / (2 D), D an
    upper bound on the largest centroid distance, and verifies both
    postconditions before returning.
    """
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    if K.is_singleton:
        return K
    exact = K.exact
    delta = ex.as_fraction(delta) if exact else float(delta)
    c = K.centroid()
    r_sq = max(ex.norm_sq(ex.sub(v, c)) for v in K.vertices)
    r = ex.sqrt_upper(r_sq, 40) if exact else sqrt(r_sq)
    lam = 1 - delta / (2 * r)
    if lam <= 0:
        lam = Fraction(1, 2) if exact else 0.5
    L = convex_hull([ex.add(c, ex.scale(lam, ex.sub(v, c))) for v in K.vertices])
    if not hausdorff_distance_sq(L, K) < delta * delta:
        raise AssertionError("shrink: Hausdorff bound violated")
    if not body_in_relint(L, K):
        raise AssertionError("shrink: result not inside the relative interior")
    return L


def boundary_net(K, r):
    """Boundary points with every boundary point within ``r`` of one of them.

    In the plane the polygon boundary is walked edge by edge with step at
    most r.  A segment in the plane is its own boundary, so it is walked
    the same way; an interval on the line has the two endpoints as its
    boundary.
    """
    if K.is_singleton:
        raise DegenerateBody("a singleton has no boundary net")
    if r <= 0:
        raise PreconditionError("radius must be positive")
    if K.dim == 1:
        return list(K.vertices)
    if K.dim != 2:
        raise DegenerateBody("boundary nets are implemented in dimensions 1 and 2")
    exact = K.exact
    r = ex.as_fraction(r) if exact else float(r)
    out = []
    edges = K.edges() if len(K.vertices) >= 3 else [(K.vertices[0], K.vertices[1])]
    for a, b in edges:
        e = ex.sub(b, a)
        l_sq = ex.norm_sq(e)
        n = max(1, ceil(sqrt(float(l_sq)) / float(r)))
        while n * n * r * r < l_sq:
            n += 1
        for i in range(n):
            t = Fraction(i, n) if exact else i / n
            out.append(ex.add(a, ex.scale(t, e)))
        if len(K.vertices) == 2:
            out.append(b)
    seen, net = set(), []
    for p in out:
        if p not in seen:
            seen.add(p)
            net.append(p)
    return net
