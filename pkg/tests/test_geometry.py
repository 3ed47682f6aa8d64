import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotsets.errors import DegenerateBody, PreconditionError, ZeroDirection
from rotsets.geometry import (
    affine_hull, body_from_json, body_in_relint, body_subset, boundary_net, contains,
    convex_hull, hausdorff_distance, hausdorff_distance_sq, in_relative_interior,
    point_sq_distance, project, shrink, support_function,
)

F = Fraction
SQUARE = convex_hull([(-1, -1), (1, -1), (1, 1), (-1, 1), (0, 0)])
TRIANGLE = convex_hull([(0, 0), (4, 0), (0, 4)])


def test_hull_drops_interior_and_collinear_points():
    K = convex_hull([(0, 0), (2, 0), (1, 0), (2, 2), (0, 2), (1, 1)])
    assert K.vertices == ((0, 0), (2, 0), (2, 2), (0, 2))
    assert all(isinstance(c, Fraction) for v in K.vertices for c in v)


def test_degenerate_hulls():
    seg = convex_hull([(0, 0), (1, 1), (3, 3)])
    assert seg.vertices == ((0, 0), (3, 3)) and seg.affine_dim == 1
    assert convex_hull([(1, 2)] * 3).is_singleton


def test_support_function_ties_pick_the_least_vertex():
    assert support_function(SQUARE, (1, 0)) == (1, (1, -1))
    assert support_function(TRIANGLE, (1, 1)) == (4, (0, 4))
    with pytest.raises(ZeroDirection):
        support_function(SQUARE, (0, 0))


def test_projection_and_containment():
    assert project(SQUARE, (3, 0)) == (1, 0)
    assert project(SQUARE, (2, 5)) == (1, 1)
    assert point_sq_distance(TRIANGLE, (3, 3)) == 2
    assert contains(SQUARE, (1, F(1, 2))) and not in_relative_interior(SQUARE, (1, F(1, 2)))
    assert in_relative_interior(convex_hull([(0, 0), (2, 2)]), (1, 1))


def test_hausdorff_of_nested_squares():
    big = convex_hull([(-2, -2), (2, -2), (2, 2), (-2, 2)])
    assert hausdorff_distance_sq(SQUARE, big) == 2
    assert hausdorff_distance(SQUARE, SQUARE) == 0


def _dense_boundary(K, per_edge=400):
    vs = np.array(K.vertices, dtype=float)
    if len(vs) == 1:
        return vs
    out = []
    edges = K.edges() if len(vs) > 2 else [(K.vertices[0], K.vertices[1])]
    for a, b in edges:
        a, b = np.array(a, dtype=float), np.array(b, dtype=float)
        t = np.linspace(0, 1, per_edge)[:, None]
        out.append(a + t * (b - a))
    return np.vstack(out)


def _sampled_hausdorff(K, L):
    # For convex bodies the distance is attained between boundaries; the
    # sup-inf is approximated by sampled points against exact projections.
    def one_way(A, B):
        return max(math.sqrt(float(point_sq_distance(B, tuple(p)))) for p in _dense_boundary(A))
    return max(one_way(K, L), one_way(L, K))


points = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=7)


@given(points, points)
def test_hausdorff_agrees_with_sampling(p, q):
    K, L = convex_hull(p), convex_hull(q)
    exact = hausdorff_distance(K, L)
    assert _sampled_hausdorff(K, L) == pytest.approx(exact, abs=1e-9)


@given(points)
def test_support_function_is_attained_by_some_input_point(p):
    K = convex_hull(p)
    for u in ((1, 0), (0, 1), (-1, 2), (3, -1)):
        h, v = support_function(K, u)
        assert h == max(a * u[0] + b * u[1] for a, b in p)
        assert v in K.vertices


@given(points)
def test_hull_is_idempotent_and_contains_its_inputs(p):
    K = convex_hull(p)
    assert convex_hull(K.vertices) == K
    assert all(contains(K, x) for x in p)


@given(points, st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_projection_is_nearest(p, x):
    K = convex_hull(p)
    q = project(K, x)
    assert contains(K, q)
    d = point_sq_distance(K, x)
    assert all(d <= (x[0] - v[0]) ** 2 + (x[1] - v[1]) ** 2 for v in K.vertices)


@pytest.mark.parametrize("K", [SQUARE, TRIANGLE, convex_hull([(0, 0), (3, 1)])])
def test_shrink_lands_in_the_relative_interior(K):
    L = shrink(K, F(1, 10))
    assert body_subset(L, K) and body_in_relint(L, K)
    assert hausdorff_distance_sq(L, K) < F(1, 100)


def test_shrink_rejects_bad_delta():
    with pytest.raises(PreconditionError):
        shrink(SQUARE, 0)


def test_affine_hull_of_a_segment():
    seg = convex_hull([(1, 1), (3, 2)])
    fr = affine_hull(seg)
    assert fr.dim == 1
    assert fr.contains((5, 3)) and not fr.contains((5, 4))
    assert fr.embed(fr.reduce((F(2), F(3, 2)))) == (2, F(3, 2))
    red = fr.reduce_body(seg)
    assert red.dim == 1 and fr.embed_body(red) == seg


def test_boundary_net_covers_the_boundary():
    r = F(1, 4)
    net = boundary_net(TRIANGLE, r)
    assert all(point_sq_distance(TRIANGLE, p) == 0 and not in_relative_interior(TRIANGLE, p) for p in net)
    for p in _dense_boundary(TRIANGLE, 200):
        assert min(math.dist(p, tuple(map(float, q))) for q in net) <= float(r) + 1e-12
    with pytest.raises(DegenerateBody):
        boundary_net(convex_hull([(0, 0)]), r)


def test_json_round_trip():
    assert body_from_json(TRIANGLE.to_json()) == TRIANGLE
    assert body_from_json({"vertices": [[0, 0], ["1/2", 1]]}).vertices[1] == (F(1, 2), 1)
