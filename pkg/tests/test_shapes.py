"""Convex hull construction and random occluder sampling."""

import numpy as np
from pytest import raises

from shapeaug.errors import DegenerateGeometryError
from shapeaug.pipeline import AugConfig
from shapeaug.shapes import (
    CIRCLE,
    POLYGON,
    SQUARE,
    convex_hull,
    sample_legacy_shape,
    sample_polygon,
    sample_scene,
)


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_vertices_bruteforce(pts):
    """Hull vertex set by testing every directed edge against all other
    points -- O(n^3), valid for point sets in general position."""
    n = len(pts)
    verts = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if all(cross(pts[i], pts[j], pts[k]) > 0
                   for k in range(n) if k != i and k != j):
                verts.add(tuple(pts[i]))
                verts.add(tuple(pts[j]))
    return verts


def assert_strictly_convex_ccw(hull):
    k = len(hull)
    assert k >= 3
    for i in range(k):
        a, b, c = hull[i], hull[(i + 1) % k], hull[(i + 2) % k]
        assert cross(a, b, c) > 0, f"vertices {i}..{i + 2} not convex CCW"


def test_hull_hand_example():
    pts = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 1), (1, 0)]
    hull = convex_hull(pts)
    # Interior point and collinear edge point are both dropped.
    assert hull.tolist() == [[0, 0], [2, 0], [2, 2], [0, 2]]


def test_hull_starts_at_lexicographic_minimum():
    rng = np.random.default_rng(11)
    for _ in range(50):
        pts = rng.uniform(0, 100, size=(int(rng.integers(3, 12)), 2))
        try:
            hull = convex_hull(pts)
        except DegenerateGeometryError:
            continue
        lo = min((float(x), float(y)) for x, y in pts)
        assert tuple(hull[0]) == lo


def test_hull_matches_bruteforce_oracle():
    rng = np.random.default_rng(31337)
    for _ in range(200):
        n = int(rng.integers(6, 11))
        pts = rng.uniform(0, 100, size=(n, 2))
        hull = convex_hull(pts)
        got = {tuple(v) for v in hull}
        want = hull_vertices_bruteforce(pts.tolist())
        assert got == want


def test_hull_output_properties():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(3, 20))
        pts = rng.uniform(-50, 50, size=(n, 2))
        hull = convex_hull(pts)
        assert_strictly_convex_ccw(hull)
        input_set = {(float(x), float(y)) for x, y in pts}
        assert all(tuple(v) in input_set for v in hull)
        # Every input point sits inside or on the hull.
        k = len(hull)
        for p in pts:
            for i in range(k):
                assert cross(hull[i], hull[(i + 1) % k], p) >= -1e-6


def test_hull_ignores_duplicates():
    pts = [(0, 0), (0, 0), (4, 0), (4, 0), (2, 3), (2, 3)]
    hull = convex_hull(pts)
    assert hull.tolist() == [[0, 0], [4, 0], [2, 3]]


def test_hull_rejects_degenerate_input():
    with raises(DegenerateGeometryError):
        convex_hull([(1, 1), (2, 2)])
    with raises(DegenerateGeometryError):
        convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])
    with raises(DegenerateGeometryError):
        convex_hull([(5, 5), (5, 5), (5, 5)])


def test_sample_polygon_bounds_and_convexity():
    rng = np.random.default_rng(42)
    for _ in range(100):
        center = rng.uniform(0, 80, size=2)
        s = float(rng.uniform(5, 30))
        hull = sample_polygon(rng, center, s)
        assert 3 <= len(hull) <= 10
        assert_strictly_convex_ccw(hull)
        assert np.all(np.abs(hull - center) <= s)


def test_sample_polygon_follows_draw_order():
    # Same seed, manual replication of the documented draw sequence.
    center = np.array([40.0, 20.0])
    poly = sample_polygon(np.random.default_rng(314), center, 10.0)
    rng = np.random.default_rng(314)
    n_p = int(rng.integers(6, 11))
    cand = center + rng.uniform(-10.0, 10.0, size=(n_p, 2))
    assert np.array_equal(poly, convex_hull(cand))


class _ScriptedRng:
    """Stands in for a Generator; replays scripted integer/uniform draws."""

    def __init__(self, scripted, fallback):
        self._scripted = list(scripted)
        self._fallback = fallback

    def integers(self, *a, **k):
        return self._fallback.integers(*a, **k)

    def uniform(self, *a, **k):
        if self._scripted:
            return self._scripted.pop(0)
        return self._fallback.uniform(*a, **k)


def test_sample_polygon_resamples_degenerate_draws():
    bad = np.zeros((8, 2))  # every candidate identical -> degenerate
    rng = _ScriptedRng([bad, bad], np.random.default_rng(0))
    hull = sample_polygon(rng, np.array([0.0, 0.0]), 5.0)
    assert_strictly_convex_ccw(hull)


def test_sample_polygon_gives_up_after_bounded_attempts():
    bad = np.zeros((6, 2))
    rng = _ScriptedRng([bad] * 100, np.random.default_rng(0))
    with raises(DegenerateGeometryError):
        sample_polygon(rng, np.array([0.0, 0.0]), 5.0)


def test_legacy_square_hand_geometry():
    cfg = AugConfig(mode="shapeaug_legacy", s_min=5.0, s_max=5.0)
    # Scan seeds for a square draw to keep the test self-contained.
    for seed in range(50):
        shape = sample_legacy_shape(np.random.default_rng(seed), cfg, 40, 40)
        if shape.kind == SQUARE:
            cx, cy = shape.center
            want = [[cx - 5, cy - 5], [cx + 5, cy - 5],
                    [cx + 5, cy + 5], [cx - 5, cy + 5]]
            assert shape.hull.tolist() == want
            assert shape.size == 5.0
            return
    raise AssertionError("no square drawn in 50 seeds")


def test_legacy_circle_hull_is_center():
    cfg = AugConfig(mode="shapeaug_legacy", s_min=2.0, s_max=8.0)
    for seed in range(50):
        shape = sample_legacy_shape(np.random.default_rng(seed), cfg, 40, 40)
        if shape.kind == CIRCLE:
            assert shape.hull.shape == (1, 2)
            assert np.array_equal(shape.hull[0], shape.center)
            assert 2.0 <= shape.size <= 8.0
            return
    raise AssertionError("no circle drawn in 50 seeds")


def test_legacy_draws_both_kinds():
    cfg = AugConfig(mode="shapeaug_legacy")
    kinds = {sample_legacy_shape(np.random.default_rng(s), cfg, 64, 64).kind
             for s in range(40)}
    assert kinds == {SQUARE, CIRCLE}


def test_scene_respects_config():
    cfg = AugConfig(mode="shapeaugpp", max_shapes=4, s_min=5.0, s_max=30.0)
    rng = np.random.default_rng(1)
    counts = set()
    for _ in range(60):
        scene = sample_scene(rng, cfg, 80, 80)
        counts.add(scene.n_shapes)
        assert 0.0 <= scene.background_color <= 1.0
        for shape in scene.shapes:
            assert shape.kind == POLYGON
            assert 5.0 <= shape.size <= 30.0
            assert 0.0 <= shape.color <= 1.0
            assert 0.0 <= shape.center[0] <= 79.0
            assert 0.0 <= shape.center[1] <= 79.0
    assert counts == {1, 2, 3, 4}


def test_scene_sampling_is_deterministic():
    cfg = AugConfig(mode="shapeaugpp", max_shapes=3)
    a = sample_scene(np.random.default_rng(123), cfg, 64, 48)
    b = sample_scene(np.random.default_rng(123), cfg, 64, 48)
    assert a.background_color == b.background_color
    assert a.n_shapes == b.n_shapes
    for sa, sb in zip(a.shapes, b.shapes):
        assert sa.kind == sb.kind
        assert sa.size == sb.size and sa.color == sb.color
        assert np.array_equal(sa.hull, sb.hull)


def test_scene_draws_background_last():
    # Replaying the per-shape draws by hand must leave exactly one
    # uniform (the background) on the stream.
    cfg = AugConfig(mode="shapeaugpp", max_shapes=2)
    scene = sample_scene(np.random.default_rng(9), cfg, 32, 32)
    rng = np.random.default_rng(9)
    n_s = int(rng.integers(1, 3))
    assert n_s == scene.n_shapes
    for shape in scene.shapes:
        cx = rng.uniform(0.0, 31)
        cy = rng.uniform(0.0, 31)
        s = rng.uniform(cfg.s_min, cfg.s_max)
        color = rng.uniform(0.0, 1.0)
        assert (cx, cy) == tuple(shape.center)
        assert float(s) == shape.size and float(color) == shape.color
        assert np.array_equal(sample_polygon(rng, shape.center, shape.size),
                              shape.hull)
    assert float(rng.uniform(0.0, 1.0)) == scene.background_color
