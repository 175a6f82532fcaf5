"""Shape motion: quadratic Bezier paths and per-step rotation.

Each shape starts at its sampled center, follows a quadratic Bezier
curve to a point outside the frame, and spins by a fixed per-step angle.
Because Bezier sampling at uniform parameter values is non-uniform in
arc length, shapes accelerate and decelerate along the way.  Legacy
linear paths fall out as the degenerate case: control point at the
segment midpoint and zero rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .shapes import ShapeSpec


@dataclass
class PathSpec:
    """A sampled motion path.

    ``samples`` has shape (n, 2): the curve evaluated at t = i/(n-1),
    so samples[0] == p0 and samples[-1] == p2 exactly.  ``gamma`` is the
    per-step rotation in degrees; the shape's total rotation at step k
    is k * gamma.
    """

    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    gamma: float
    samples: np.ndarray


def bezier_points(p0, p1, p2, n: int) -> np.ndarray:
    """Evaluate the quadratic Bezier curve at n uniform parameter values.

    B(t) = (1-t)^2 p0 + 2(1-t)t p1 + t^2 p2 for t = i/(n-1),
    i = 0..n-1.  Returns an (n, 2) float64 array.
    """
    if n < 2:
        raise ConfigError(f"need at least 2 path samples, got {n}")
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    t = np.linspace(0.0, 1.0, n)[:, None]
    u = 1.0 - t
    return u * u * p0 + 2.0 * u * t * p1 + t * t * p2


def _perimeter_point(u: float, s: float, W: int, H: int) -> np.ndarray:
    """Map arc length u to a point on the frame rectangle inflated by s.

    The walk covers the top edge (y = -s), then bottom (y = H+s), then
    left (x = -s), then right (x = W+s), each over a half-open interval
    so corners are counted once.
    """
    top = W + 2.0 * s
    side = H + 2.0 * s
    if u < top:
        return np.array([-s + u, -s])
    u -= top
    if u < top:
        return np.array([-s + u, H + s])
    u -= top
    if u < side:
        return np.array([-s, -s + u])
    u -= side
    return np.array([W + s, -s + u])


def sample_path(rng: np.random.Generator, center: np.ndarray, s: float,
                W: int, H: int, n: int, *, linear: bool = False,
                control_point_relative: bool = False) -> PathSpec:
    """Draw a motion path starting at ``center``.

    p2 is uniform over the perimeter of the frame rectangle pushed
    outward by the shape size s, so the shape fully exits the frame.
    p1 spans U(-W/2, W/2) x U(-H/2, H/2) -- absolute coordinates by
    default, offsets from p0 when ``control_point_relative`` is set.
    The per-step rotation is gamma ~ U(-10, 10) degrees.

    ``linear`` (legacy mode) skips the p1/gamma draws: the control point
    is the p0-p2 midpoint, which reduces the curve to uniform linear
    motion, and gamma is 0.
    """
    p0 = np.asarray(center, dtype=np.float64).copy()
    perimeter = 2.0 * (W + 2.0 * s) + 2.0 * (H + 2.0 * s)
    if linear:
        p2 = _perimeter_point(rng.uniform(0.0, perimeter), s, W, H)
        p1 = 0.5 * (p0 + p2)
        gamma = 0.0
    else:
        p1 = np.array([rng.uniform(-W / 2.0, W / 2.0),
                       rng.uniform(-H / 2.0, H / 2.0)])
        if control_point_relative:
            p1 = p0 + p1
        p2 = _perimeter_point(rng.uniform(0.0, perimeter), s, W, H)
        gamma = float(rng.uniform(-10.0, 10.0))
    return PathSpec(p0, p1, p2, gamma, bezier_points(p0, p1, p2, n))


def rotate_shape(hull: np.ndarray, pivot, angle_deg: float) -> np.ndarray:
    """Rotate hull vertices about ``pivot`` by ``angle_deg`` degrees.

    Vertex order is preserved, so convexity and winding survive.  A zero
    angle returns the vertices bit-for-bit (no round-trip through the
    rotation arithmetic).
    """
    hull = np.asarray(hull, dtype=np.float64)
    if angle_deg == 0.0:
        return hull.copy()
    pivot = np.asarray(pivot, dtype=np.float64)
    rad = math.radians(angle_deg)
    c, sn = math.cos(rad), math.sin(rad)
    # x' = c*dx - s*dy, y' = s*dx + c*dy, as one matmul.
    rot = np.array([[c, sn], [-sn, c]])
    return (hull - pivot) @ rot + pivot


def place_shape_at_step(shape: ShapeSpec, path: PathSpec,
                        step: int) -> np.ndarray:
    """Vertices of ``shape`` at path step ``step``.

    The hull is translated so the shape center sits at samples[step],
    then rotated about that point by the accumulated angle step * gamma.
    Circles are carried as their single center row; translation moves it
    and rotation about itself is a no-op, so the same code path serves.
    """
    if not 0 <= step < len(path.samples):
        raise IndexError(
            f"step {step} out of range for {len(path.samples)} samples")
    target = path.samples[step]
    moved = shape.hull + (target - shape.center)
    return rotate_shape(moved, target, step * path.gamma)
