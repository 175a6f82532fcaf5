"""Rasterize shape scenes into grayscale frames with occlusion masks.

Coverage is binary and exact: a pixel (x, y) belongs to a shape iff its
center (x + 0.5, y + 0.5) lies inside or on the shape boundary.  No
anti-aliasing -- events are per-pixel discrete, and a half-covered pixel
has no meaningful polarity.  Shapes are painted in scene order (painter's
algorithm), so a later shape overwrites earlier ones where they overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, floor

import numpy as np

from .motion import PathSpec
from .shapes import CIRCLE, SceneSpec, ShapeSpec


@dataclass
class Frame:
    """One rendered frame: grayscale intensity plus foreground mask.

    Wherever ``mask`` is true, ``intensity`` holds the color of the
    topmost shape covering that pixel; everywhere else it holds the
    scene background color.
    """

    intensity: np.ndarray
    mask: np.ndarray


@dataclass
class FrameSequence:
    """T+1 frames as stacked arrays: intensity (T+1, H, W), mask alike."""

    intensity: np.ndarray
    mask: np.ndarray

    @property
    def timesteps(self) -> int:
        return self.intensity.shape[0] - 1

    def __len__(self) -> int:
        return self.intensity.shape[0]

    def __getitem__(self, k: int) -> Frame:
        return Frame(self.intensity[k], self.mask[k])

    @property
    def frames(self) -> list[Frame]:
        return [self[k] for k in range(len(self))]


@lru_cache(maxsize=16)
def _pixel_centers(n: int) -> np.ndarray:
    """Cached read-only [0.5, 1.5, ...] array; raster inner-loop reuse."""
    c = np.arange(n, dtype=np.float64) + 0.5
    c.flags.writeable = False
    return c


def polygon_coverage(verts: np.ndarray, W: int, H: int) -> np.ndarray:
    """Boolean (H, W) coverage mask of a CCW convex polygon."""
    out = np.zeros((H, W), dtype=bool)
    box = _clip_bbox(verts[:, 0].min(), verts[:, 0].max(),
                     verts[:, 1].min(), verts[:, 1].max(), W, H)
    if box is not None:
        y0, y1, x0, x1 = box
        out[y0:y1, x0:x1] = _polygon_cov(
            verts, _pixel_centers(W)[x0:x1], _pixel_centers(H)[y0:y1])
    return out


def circle_coverage(center, radius: float, W: int, H: int) -> np.ndarray:
    """Boolean (H, W) coverage mask of a circle."""
    cx, cy = float(center[0]), float(center[1])
    out = np.zeros((H, W), dtype=bool)
    box = _clip_bbox(cx - radius, cx + radius, cy - radius, cy + radius, W, H)
    if box is not None:
        y0, y1, x0, x1 = box
        out[y0:y1, x0:x1] = _circle_cov(
            cx, cy, radius, _pixel_centers(W)[x0:x1], _pixel_centers(H)[y0:y1])
    return out


def _clip_bbox(xmin, xmax, ymin, ymax, W, H):
    """Pixel row/col range whose centers can fall inside the bounds."""
    x0 = max(0, ceil(xmin - 0.5))
    x1 = min(W, floor(xmax - 0.5) + 1)
    y0 = max(0, ceil(ymin - 0.5))
    y1 = min(H, floor(ymax - 0.5) + 1)
    if x0 >= x1 or y0 >= y1:
        return None
    return y0, y1, x0, x1


@lru_cache(maxsize=16)
def _next_vertex_idx(k: int) -> np.ndarray:
    idx = np.arange(1, k + 1)
    idx[-1] = 0
    idx.flags.writeable = False
    return idx


def _cov_core(a, e, xs, ys):
    # Pixel center c is inside-or-on iff for every CCW edge a -> a+e:
    # e.x*(c.y-a.y) >= e.y*(c.x-a.x).
    t1 = e[:, 0][:, None] * (ys[None, :] - a[:, 1][:, None])
    t2 = e[:, 1][:, None] * (xs[None, :] - a[:, 0][:, None])
    return (t1[:, :, None] >= t2[:, None, :]).all(axis=0)


def _polygon_cov(verts, xs, ys):
    edges = verts[_next_vertex_idx(len(verts))] - verts
    return _cov_core(verts, edges, xs, ys)


def _circle_cov(cx, cy, r, xs, ys):
    d2 = (ys - cy)[:, None] ** 2 + (xs - cx)[None, :] ** 2
    return d2 <= r * r


def _paint(intensity, mask, shape: ShapeSpec, verts: np.ndarray,
           W: int, H: int) -> None:
    """Paint one placed shape into 2D intensity/mask arrays, in place."""
    if shape.kind == CIRCLE:
        cx, cy = float(verts[0, 0]), float(verts[0, 1])
        r = shape.size
        box = _clip_bbox(cx - r, cx + r, cy - r, cy + r, W, H)
        if box is None:
            return
        y0, y1, x0, x1 = box
        cov = _circle_cov(cx, cy, r,
                          _pixel_centers(W)[x0:x1], _pixel_centers(H)[y0:y1])
    else:
        box = _clip_bbox(verts[:, 0].min(), verts[:, 0].max(),
                         verts[:, 1].min(), verts[:, 1].max(), W, H)
        if box is None:
            return
        y0, y1, x0, x1 = box
        cov = _polygon_cov(verts,
                           _pixel_centers(W)[x0:x1], _pixel_centers(H)[y0:y1])
    _write(intensity, mask, cov, np.float32(shape.color), y0, y1, x0, x1)


def _write(intensity, mask, cov, color, y0, y1, x0, x1) -> None:
    sub = intensity[y0:y1, x0:x1]
    np.copyto(sub, color, where=cov)
    sub_m = mask[y0:y1, x0:x1]
    np.logical_or(sub_m, cov, out=sub_m)


def rasterize_scene(scene: SceneSpec, placements: list[np.ndarray],
                    W: int, H: int) -> Frame:
    """Render one frame of the scene with shapes at the given placements.

    ``placements`` holds one vertex array per scene shape (parallel
    lists).  Shapes entirely outside the frame paint nothing.
    """
    if len(placements) != len(scene.shapes):
        raise ValueError(
            f"{len(placements)} placements for {len(scene.shapes)} shapes")
    intensity = np.full((H, W), scene.background_color, dtype=np.float32)
    mask = np.zeros((H, W), dtype=bool)
    for shape, verts in zip(scene.shapes, placements):
        _paint(intensity, mask, shape, verts, W, H)
    return Frame(intensity, mask)


def _place_batch(shape: ShapeSpec, path: PathSpec) -> np.ndarray:
    """Vertices of ``shape`` at every path step, shape (n, k, 2).

    Numerically equivalent to place_shape_at_step per step (same
    rotation trig, composed in one batched matmul) up to float round-off
    in the translation order.
    """
    samples = path.samples
    d0 = shape.hull - shape.center
    if path.gamma == 0.0:
        return d0[None, :, :] + samples[:, None, :]
    n = len(samples)
    rots = np.empty((n, 2, 2))
    for k in range(n):
        rad = math.radians(k * path.gamma)
        c, s = math.cos(rad), math.sin(rad)
        rots[k, 0, 0] = c
        rots[k, 0, 1] = s
        rots[k, 1, 0] = -s
        rots[k, 1, 1] = c
    return d0 @ rots + samples[:, None, :]


def render_sequence(scene: SceneSpec, paths: list[PathSpec], T: int,
                    W: int, H: int) -> FrameSequence:
    """Render the scene at every path step: T+1 frames.

    Frame k places each shape at its path sample k; the background color
    is constant across the sequence.  Steps where a shape's bounding
    circle misses every pixel center are skipped outright.
    """
    if len(paths) != len(scene.shapes):
        raise ValueError(f"{len(paths)} paths for {len(scene.shapes)} shapes")
    for i, path in enumerate(paths):
        if len(path.samples) != T + 1:
            raise ValueError(
                f"path {i} has {len(path.samples)} samples, need {T + 1}")
    intensity = np.full((T + 1, H, W), scene.background_color,
                        dtype=np.float32)
    mask = np.zeros((T + 1, H, W), dtype=bool)
    xs_all = _pixel_centers(W)
    ys_all = _pixel_centers(H)
    for shape, path in zip(scene.shapes, paths):
        placed = _place_batch(shape, path)
        color = np.float32(shape.color)
        if shape.kind == CIRCLE:
            r = shape.size
            for k, (cx, cy) in enumerate(placed[:, 0, :].tolist()):
                box = _clip_bbox(cx - r, cx + r, cy - r, cy + r, W, H)
                if box is None:
                    continue
                y0, y1, x0, x1 = box
                cov = _circle_cov(cx, cy, r, xs_all[x0:x1], ys_all[y0:y1])
                _write(intensity[k], mask[k], cov, color, y0, y1, x0, x1)
        else:
            edges = placed[:, _next_vertex_idx(placed.shape[1]), :] - placed
            mins = placed.min(axis=1).tolist()
            maxs = placed.max(axis=1).tolist()
            ubox = _clip_bbox(min(m[0] for m in mins), max(m[0] for m in maxs),
                              min(m[1] for m in mins), max(m[1] for m in maxs),
                              W, H)
            if ubox is None:
                continue
            uy0, uy1, ux0, ux1 = ubox
            # Half-plane products for every step over the trajectory's
            # union bbox, in one shot; per step only slice+compare remain.
            # Same elementwise expressions as _cov_core.
            t1 = (edges[:, :, 0][:, :, None]
                  * (ys_all[None, None, uy0:uy1]
                     - placed[:, :, 1][:, :, None]))
            t2 = (edges[:, :, 1][:, :, None]
                  * (xs_all[None, None, ux0:ux1]
                     - placed[:, :, 0][:, :, None]))
            for k in range(T + 1):
                box = _clip_bbox(mins[k][0], maxs[k][0],
                                 mins[k][1], maxs[k][1], W, H)
                if box is None:
                    continue
                y0, y1, x0, x1 = box
                cov = (t1[k, :, y0 - uy0:y1 - uy0, None]
                       >= t2[k, :, None, x0 - ux0:x1 - ux0]).all(axis=0)
                _write(intensity[k], mask[k], cov, color, y0, y1, x0, x1)
    return FrameSequence(intensity, mask)
