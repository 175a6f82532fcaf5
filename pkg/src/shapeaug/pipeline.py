"""Full augmentation pipelines over event histograms.

Three modes: "shapeaugpp" (random convex polygons on curved paths),
"shapeaug_legacy" (squares and circles on straight lines), and "none"
(pass-through).  An optional geometric stage (pad + random crop + flip +
rotate) runs before the shape stage, so the simulated shape events are
never warped by it.

Reproducibility contract: every sample's randomness comes from a
generator derived from (cfg.seed, sample_index) alone, and each stage
draws in a fixed documented order.  Batch results are therefore
identical no matter how many threads run them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from .errors import ConfigError, ShapeAugError
from .events import EventHistogram
from .motion import PathSpec, sample_path
from .render import FrameSequence, render_sequence
from .shapes import SceneSpec, sample_scene
from .simulate import NoiseParams, occlusion_mask, simulate_shape_events

MODE_SHAPEAUGPP = "shapeaugpp"
MODE_LEGACY = "shapeaug_legacy"
MODE_NONE = "none"
MODES = (MODE_SHAPEAUGPP, MODE_LEGACY, MODE_NONE)


@dataclass
class GeoParams:
    """Geometric augmentation: pad, random crop, random flip, random rotate."""

    pad: int = 7
    crop_h: int = 80
    crop_w: int = 80
    p_hflip: float = 0.5
    max_rotate_deg: float = 15.0

    def __post_init__(self):
        if self.pad < 0:
            raise ConfigError(f"pad must be >= 0, got {self.pad}")
        if self.crop_h < 1 or self.crop_w < 1:
            raise ConfigError(
                f"crop dims must be >= 1, got {self.crop_h}x{self.crop_w}")
        if not 0.0 <= self.p_hflip <= 1.0:
            raise ConfigError(f"p_hflip must be in [0, 1], got {self.p_hflip}")
        if self.max_rotate_deg < 0.0:
            raise ConfigError(
                f"max_rotate_deg must be >= 0, got {self.max_rotate_deg}")


@dataclass
class AugConfig:
    """Every tunable of the pipeline.

    ``seed`` plus a per-call sample index fully determine each sample's
    randomness.  ``geo`` is None to skip the geometric stage.  Shape
    sizes are half-extents in pixels: polygon vertices scatter within
    center +- s, squares get side 2s, circles radius s.
    """

    mode: str = MODE_SHAPEAUGPP
    max_shapes: int = 4
    s_min: float = 5.0
    s_max: float = 30.0
    timesteps: int = 10
    noise: NoiseParams = field(default_factory=NoiseParams)
    geo: GeoParams | None = None
    seed: int = 0
    control_point_relative: bool = False
    mask_union: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(
                f"mode must be one of {', '.join(MODES)}; got {self.mode!r}")
        if self.max_shapes < 1:
            raise ConfigError(
                f"max_shapes must be >= 1, got {self.max_shapes}")
        if not 0.0 < self.s_min <= self.s_max:
            raise ConfigError(
                f"need 0 < s_min <= s_max, got ({self.s_min}, {self.s_max})")
        if self.timesteps < 1:
            raise ConfigError(
                f"timesteps must be >= 1, got {self.timesteps}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(
                f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass
class AugResult:
    """augment_detail output: the histogram plus all intermediates.

    The intermediate fields are None in mode \"none\" (nothing is
    generated).
    """

    output: EventHistogram
    scene: SceneSpec | None = None
    paths: list[PathSpec] | None = None
    sequence: FrameSequence | None = None
    simulated: EventHistogram | None = None


def derive_rng(seed: int, sample_index: int) -> np.random.Generator:
    """Per-sample generator; independent streams for distinct indices."""
    ss = np.random.SeedSequence(seed, spawn_key=(sample_index,))
    return np.random.Generator(np.random.PCG64(ss))


def sample_shape_motion(rng: np.random.Generator, cfg: AugConfig,
                        W: int, H: int) -> tuple[SceneSpec, list[PathSpec]]:
    """Draw the scene and one path per shape (scene first, then paths)."""
    scene = sample_scene(rng, cfg, W, H)
    linear = cfg.mode == MODE_LEGACY
    paths = [
        sample_path(rng, shape.center, shape.size, W, H, cfg.timesteps + 1,
                    linear=linear,
                    control_point_relative=cfg.control_point_relative)
        for shape in scene.shapes
    ]
    return scene, paths


def augment_detail(hist: EventHistogram, cfg: AugConfig, sample_index: int,
                   timings: dict | None = None) -> AugResult:
    """Augment one histogram and keep the intermediates.

    Stage order: geometric (when cfg.geo is set), scene + path sampling,
    frame rendering, event simulation, occlusion masking, merge.  All
    stages share one per-sample generator, so the draw sequence is
    fixed.  ``timings`` accumulates per-stage seconds under the keys
    geo, scene_gen, raster, diff, noise, mask.
    """
    if hist.timesteps != cfg.timesteps:
        raise ConfigError(
            f"histogram has {hist.timesteps} timesteps, config says "
            f"{cfg.timesteps}")
    rng = derive_rng(cfg.seed, sample_index)
    if cfg.geo is not None:
        tic = perf_counter()
        hist = augment_geometric(hist, cfg.geo, rng)
        if timings is not None:
            timings["geo"] = timings.get("geo", 0.0) + perf_counter() - tic
    if cfg.mode == MODE_NONE:
        return AugResult(EventHistogram(hist.data.copy()))

    H, W = hist.height, hist.width
    tic = perf_counter()
    scene, paths = sample_shape_motion(rng, cfg, W, H)
    if timings is not None:
        timings["scene_gen"] = (timings.get("scene_gen", 0.0)
                                + perf_counter() - tic)
    tic = perf_counter()
    seq = render_sequence(scene, paths, cfg.timesteps, W, H)
    if timings is not None:
        timings["raster"] = timings.get("raster", 0.0) + perf_counter() - tic
    simulated = simulate_shape_events(seq, rng, cfg.noise, timings)
    tic = perf_counter()
    out = occlusion_mask(hist, seq, union=cfg.mask_union)
    # occlusion_mask hands back a fresh tensor, so the merge can add in
    # place; same values as merge_histograms without another allocation.
    out.data += simulated.data
    if timings is not None:
        timings["mask"] = timings.get("mask", 0.0) + perf_counter() - tic
    return AugResult(out, scene, paths, seq, simulated)


def augment(hist: EventHistogram, cfg: AugConfig, sample_index: int,
            timings: dict | None = None) -> EventHistogram:
    """Augment one histogram (see augment_detail for the stage order)."""
    return augment_detail(hist, cfg, sample_index, timings).output


def augment_geometric(hist: EventHistogram, gp: GeoParams,
                      rng: np.random.Generator) -> EventHistogram:
    """Pad, random-crop, random-flip, random-rotate a histogram.

    Spatial slices are zero-padded by gp.pad on every side, cropped at a
    uniform random offset to (crop_h, crop_w), horizontally flipped with
    probability p_hflip (both polarity channels together), and rotated
    about the spatial center by U(-max_rotate_deg, +max_rotate_deg) with
    bilinear resampling and zero fill.  Exactly four draws per call:
    crop row, crop column, flip, angle.
    """
    pad = gp.pad
    data = hist.data
    pH = hist.height + 2 * pad
    pW = hist.width + 2 * pad
    if gp.crop_h > pH or gp.crop_w > pW:
        raise ConfigError(
            f"crop {gp.crop_h}x{gp.crop_w} exceeds padded dims {pH}x{pW}")
    if pad:
        data = np.pad(data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    oy = int(rng.integers(0, pH - gp.crop_h + 1))
    ox = int(rng.integers(0, pW - gp.crop_w + 1))
    data = data[:, :, oy:oy + gp.crop_h, ox:ox + gp.crop_w]
    if rng.uniform() < gp.p_hflip:
        data = data[:, :, :, ::-1]
    angle = float(rng.uniform(-gp.max_rotate_deg, gp.max_rotate_deg))
    if angle != 0.0:
        data = _rotate_slices(data, angle)
    return EventHistogram(np.ascontiguousarray(data))


def _rotate_slices(data: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate every (t, p) slice about the spatial center, zero fill.

    Inverse mapping with bilinear sampling at pixel centers: output
    pixel (x+0.5, y+0.5) reads the source at the back-rotated position.
    """
    H, W = data.shape[2], data.shape[3]
    cy, cx = H / 2.0, W / 2.0
    rad = np.deg2rad(angle_deg)
    c, s = np.cos(rad), np.sin(rad)
    ys, xs = np.meshgrid(np.arange(H) + 0.5, np.arange(W) + 0.5,
                         indexing="ij")
    dx = xs - cx
    dy = ys - cy
    sx = cx + c * dx + s * dy
    sy = cy - s * dx + c * dy
    # Continuous source coord -> neighboring pixel centers and weights.
    ux = sx - 0.5
    uy = sy - 0.5
    x0 = np.floor(ux).astype(np.int64)
    y0 = np.floor(uy).astype(np.int64)
    wx = ux - x0
    wy = uy - y0
    out = np.zeros_like(data, dtype=np.float64)
    for ddy in (0, 1):
        for ddx in (0, 1):
            xi = x0 + ddx
            yi = y0 + ddy
            w = (wy if ddy else 1.0 - wy) * (wx if ddx else 1.0 - wx)
            valid = (xi >= 0) & (xi < W) & (yi >= 0) & (yi < H)
            xi_c = np.clip(xi, 0, W - 1)
            yi_c = np.clip(yi, 0, H - 1)
            out += data[:, :, yi_c, xi_c] * (w * valid)
    return out.astype(np.float32)


def augment_batch(hists: list[EventHistogram], cfg: AugConfig,
                  base_index: int = 0, *,
                  threads: int = 1) -> list[EventHistogram]:
    """Augment a batch; element i uses sample index base_index + i.

    Results are a pure function of (inputs, cfg, base_index) -- the
    thread count changes wall time only.  A failing sample re-raises its
    error with the sample index prefixed.
    """

    def one(i: int) -> EventHistogram:
        try:
            return augment(hists[i], cfg, base_index + i)
        except ShapeAugError as exc:
            exc.args = (f"sample {base_index + i}: {exc}",)
            raise

    if threads <= 1:
        return [one(i) for i in range(len(hists))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(len(hists))))
