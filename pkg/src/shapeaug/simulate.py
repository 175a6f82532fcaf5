"""Synthesize events from rendered frames and occlude the real stream.

A DVS pixel reports intensity *changes*, so the simulated events of a
moving shape come from differencing consecutive frames: a brightening
pixel emits positive events, a darkening one negative events, and a
pixel whose intensity is unchanged -- including the interior of a shape
moving over itself -- emits nothing.  Sensor imperfection is imitated by
jittering per-cell counts, dropping cells to zero, and clipping extreme
counts.  Real events underneath a foreground shape are masked out.
"""

from __future__ import annotations

from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .errors import ConfigError
from .events import EventHistogram, NEGATIVE, POSITIVE
from .render import Frame, FrameSequence


@dataclass
class NoiseParams:
    """Noise model knobs for simulated shape events.

    Each nonzero count is scaled by an independent draw from
    U(count_jitter_lo, count_jitter_hi) and re-rounded; each cell is
    zeroed with probability p_zero; finally every value is clipped to
    clip_base * (post-jitter nonzero maximum) * U(clip_rand_lo,
    clip_rand_hi), one clip draw per tensor.  event_scale converts an
    intensity difference into an event count before any of that.
    Set ``enabled`` false to emit the raw differencing counts.
    """

    count_jitter_lo: float = 0.5
    count_jitter_hi: float = 1.5
    p_zero: float = 0.1
    clip_base: float = 0.9
    clip_rand_lo: float = 0.5
    clip_rand_hi: float = 1.0
    event_scale: float = 5.0
    enabled: bool = True

    def __post_init__(self):
        if not 0.0 <= self.p_zero <= 1.0:
            raise ConfigError(f"p_zero must be in [0, 1], got {self.p_zero}")
        if not 0.0 < self.count_jitter_lo <= self.count_jitter_hi:
            raise ConfigError(
                "need 0 < count_jitter_lo <= count_jitter_hi, got "
                f"({self.count_jitter_lo}, {self.count_jitter_hi})")
        if not 0.0 < self.clip_rand_lo <= self.clip_rand_hi <= 1.0:
            raise ConfigError(
                "need 0 < clip_rand_lo <= clip_rand_hi <= 1, got "
                f"({self.clip_rand_lo}, {self.clip_rand_hi})")
        if self.event_scale <= 0.0:
            raise ConfigError(
                f"event_scale must be positive, got {self.event_scale}")


def _round_half_up(x: np.ndarray) -> np.ndarray:
    # Fixed tie rule so outputs are comparable across implementations
    # (numpy's round() rounds half to even).
    return np.floor(x + 0.5)


def _signed_counts(d: np.ndarray, scale: float) -> np.ndarray:
    """Split signed intensity differences into per-polarity counts.

    d has shape (..., H, W); the result has shape (..., 2, H, W) with
    channel NEGATIVE = rounded scaled decreases and POSITIVE = rounded
    scaled increases.  Consumes d (clobbered in place).
    """
    # Work on contiguous temporaries (d doubles as the negative one);
    # strided channel views make the ufunc passes ~2x slower.
    np.multiply(d, scale, out=d)
    pos = np.maximum(d, 0.0)
    pos += 0.5
    np.floor(pos, out=pos)
    np.negative(d, out=d)
    np.maximum(d, 0.0, out=d)
    d += 0.5
    np.floor(d, out=d)
    out = np.empty(d.shape[:-2] + (2,) + d.shape[-2:], dtype=d.dtype)
    out[..., POSITIVE, :, :] = pos
    out[..., NEGATIVE, :, :] = d
    return out


def diff_to_events(prev: Frame, next: Frame, scale: float) -> np.ndarray:
    """Per-pixel signed event counts between two frames, shape (2, H, W)."""
    if prev.intensity.shape != next.intensity.shape:
        raise ValueError(
            f"frame shape mismatch: {prev.intensity.shape} vs "
            f"{next.intensity.shape}")
    return _signed_counts(next.intensity - prev.intensity, scale)


def apply_noise(counts: np.ndarray, rng: np.random.Generator,
                params: NoiseParams) -> np.ndarray:
    """Jitter, drop out, and clip a non-negative count tensor.

    Draw order (part of the reproducibility contract): one jitter value
    per nonzero cell (uniform over the jitter bounds), one dropout value
    per nonzero cell (rng.random), then a single clip value.  Zero cells
    receive no draws -- jitter and dropout both map zero to zero, so
    skipping them changes nothing observable.  All-zero input
    short-circuits with no draws at all.  The dtype of ``counts`` is
    preserved; the arithmetic runs in float64 either way.
    """
    return _noise_into(counts.copy(), rng, params)


def _noise_into(out: np.ndarray, rng: np.random.Generator,
                params: NoiseParams) -> np.ndarray:
    """apply_noise core; clobbers and returns ``out``."""
    flat = out.reshape(-1)
    # Boolean nonzero is far cheaper than nonzero on the float tensor.
    idx = (flat > 0).nonzero()[0]
    if idx.size == 0:
        return out
    vals = flat[idx].astype(np.float64, copy=False)
    jitter = rng.uniform(params.count_jitter_lo, params.count_jitter_hi,
                         idx.size)
    vals = _round_half_up(vals * jitter)
    post_jitter_max = vals.max()
    vals[rng.random(idx.size) < params.p_zero] = 0.0
    clip_u = rng.uniform(params.clip_rand_lo, params.clip_rand_hi)
    if post_jitter_max > 0.0:
        np.minimum(vals, params.clip_base * post_jitter_max * clip_u,
                   out=vals)
    flat[idx] = vals
    return out


def occlusion_mask(hist: EventHistogram, seq: FrameSequence, *,
                   union: bool = False) -> EventHistogram:
    """Zero real-event cells hidden behind foreground shapes.

    Timestep k is masked with the foreground of frame k+1 -- the shape
    configuration the interval moves into.  With ``union`` the mask of
    frame k is OR-ed in as well, hiding pixels covered at either end of
    the interval.
    """
    T = hist.timesteps
    if seq.timesteps != T:
        raise ValueError(
            f"sequence has {seq.timesteps} timesteps, histogram has {T}")
    if seq.intensity.shape[1:] != (hist.height, hist.width):
        raise ValueError(
            f"spatial dims mismatch: frames {seq.intensity.shape[1:]} vs "
            f"histogram {(hist.height, hist.width)}")
    m = seq.mask[1:]
    if union:
        m = m | seq.mask[:-1]
    return EventHistogram(hist.data * ~m[:, None, :, :])


def simulate_shape_events(seq: FrameSequence, rng: np.random.Generator,
                          params: NoiseParams,
                          timings: dict | None = None) -> EventHistogram:
    """Events emitted by the rendered shapes: differencing plus noise.

    Stacks the T consecutive frame differences into a (T, 2, H, W)
    tensor and, when the noise model is enabled, passes it through
    apply_noise.  A static sequence yields an all-zero histogram.
    ``timings`` (benchmark hook) accumulates stage seconds under the
    keys "diff" and "noise".
    """
    tic = perf_counter()
    d = seq.intensity[1:] - seq.intensity[:-1]
    counts = _signed_counts(d, params.event_scale)
    if timings is not None:
        timings["diff"] = timings.get("diff", 0.0) + perf_counter() - tic
    tic = perf_counter()
    if params.enabled:
        # counts is freshly allocated here, so noise can run in place.
        counts = _noise_into(counts, rng, params)
    if timings is not None:
        timings["noise"] = timings.get("noise", 0.0) + perf_counter() - tic
    return EventHistogram(counts)
