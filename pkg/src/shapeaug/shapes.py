"""Random occluder shapes.

The main mode draws a cloud of 6-10 candidate vertices around a random
center and keeps their convex hull, giving irregular convex polygons that
are still large enough to occlude.  The legacy mode draws axis-aligned
squares and circles instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DegenerateGeometryError

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from .pipeline import AugConfig

POLYGON = "polygon"
SQUARE = "square"
CIRCLE = "circle"

# Degenerate candidate sets (all collinear / duplicated) have probability
# zero under continuous sampling; a bounded retry keeps sampling total.
_MAX_RESAMPLE = 16


@dataclass
class ShapeSpec:
    """One occluder shape.

    ``hull`` is a (k, 2) float64 array of vertices in (x, y) pixel
    coordinates, counter-clockwise.  For circles the hull is a single row
    holding the center and ``size`` is the radius; for squares it is the
    4 corners of the axis-aligned square with half-side ``size``.
    """

    kind: str
    center: np.ndarray
    size: float
    color: float
    hull: np.ndarray


@dataclass
class SceneSpec:
    """All shapes of one augmented sample plus the background intensity."""

    shapes: list[ShapeSpec]
    background_color: float

    @property
    def n_shapes(self) -> int:
        return len(self.shapes)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Convex hull of a 2D point set (monotone chain).

    Returns the hull vertices as a (k, 2) float64 array in
    counter-clockwise order, starting from the lexicographically smallest
    point.  Collinear boundary points are dropped, so consecutive
    vertices a, b, c always satisfy cross(b-a, c-b) > 0.

    Raises DegenerateGeometryError when fewer than 3 distinct points
    remain after exact-duplicate removal, or when all points are
    collinear.
    """
    raw = np.asarray(points, dtype=np.float64).reshape(-1, 2).tolist()
    pts = sorted({(p[0], p[1]) for p in raw})
    if len(pts) < 3:
        raise DegenerateGeometryError(
            f"need >= 3 distinct points, got {len(pts)}")

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateGeometryError("all points are collinear")
    return np.array(hull, dtype=np.float64)


def sample_polygon(rng: np.random.Generator, center: np.ndarray,
                   s: float) -> np.ndarray:
    """Draw a random convex polygon around ``center``.

    The vertex count is uniform over [6, 10]; each candidate vertex is
    center + (U(-s, s), U(-s, s)); the result is the convex hull of the
    candidates.  Degenerate draws are resampled wholesale.
    """
    center = np.asarray(center, dtype=np.float64)
    for _ in range(_MAX_RESAMPLE):
        n_p = int(rng.integers(6, 11))
        candidates = center + rng.uniform(-s, s, size=(n_p, 2))
        try:
            return convex_hull(candidates)
        except DegenerateGeometryError:
            continue
    raise DegenerateGeometryError(
        f"no valid polygon after {_MAX_RESAMPLE} attempts")


def sample_legacy_shape(rng: np.random.Generator, cfg: "AugConfig",
                        W: int, H: int) -> ShapeSpec:
    """Draw one legacy square or circle (equal probability)."""
    cx = rng.uniform(0.0, W - 1)
    cy = rng.uniform(0.0, H - 1)
    s = rng.uniform(cfg.s_min, cfg.s_max)
    color = rng.uniform(0.0, 1.0)
    center = np.array([cx, cy], dtype=np.float64)
    if int(rng.integers(0, 2)) == 0:
        hull = np.array([[cx - s, cy - s], [cx + s, cy - s],
                         [cx + s, cy + s], [cx - s, cy + s]])
        return ShapeSpec(SQUARE, center, float(s), float(color), hull)
    return ShapeSpec(CIRCLE, center, float(s), float(color),
                     center.reshape(1, 2).copy())


def sample_scene(rng: np.random.Generator, cfg: "AugConfig",
                 W: int, H: int) -> SceneSpec:
    """Draw a full occluder scene for one sample.

    The shape count is uniform over [1, cfg.max_shapes].  Per shape the
    draws are: center x, center y, size, color, then the hull candidates
    (legacy mode: then the square/circle choice).  The background
    intensity is drawn last.  A fixed draw order is part of the
    reproducibility contract: equal (seed, cfg, W, H) must give an
    identical scene.
    """
    n_s = int(rng.integers(1, cfg.max_shapes + 1))
    shapes: list[ShapeSpec] = []
    for _ in range(n_s):
        if cfg.mode == "shapeaug_legacy":
            shapes.append(sample_legacy_shape(rng, cfg, W, H))
        else:
            cx = rng.uniform(0.0, W - 1)
            cy = rng.uniform(0.0, H - 1)
            s = rng.uniform(cfg.s_min, cfg.s_max)
            color = rng.uniform(0.0, 1.0)
            center = np.array([cx, cy], dtype=np.float64)
            hull = sample_polygon(rng, center, float(s))
            shapes.append(ShapeSpec(POLYGON, center, float(s), float(color),
                                    hull))
    background = rng.uniform(0.0, 1.0)
    return SceneSpec(shapes, float(background))
