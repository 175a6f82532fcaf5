"""Event data model and histogram construction.

An event stream is an ordered sequence of (x, y, t, p) tuples: pixel
position, timestamp in microseconds, and polarity (0 = brightness
decrease, 1 = increase).  Streams are densified into histograms of shape
(T, 2, H, W): per timestep bin, per polarity channel, per pixel.  Channel
index equals the polarity value, so channel 0 holds negative events and
channel 1 positive events.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ConfigError, DataError

# Binary record layout shared with the file format: little-endian,
# packed, 13 bytes per event.
EVENT_DTYPE = np.dtype([("x", "<u2"), ("y", "<u2"), ("t", "<u8"), ("p", "u1")])

NEGATIVE = 0
POSITIVE = 1


class Event(NamedTuple):
    """A single sensor event."""

    x: int
    y: int
    t: int
    p: int


@dataclass
class EventStream:
    """Events recorded by a W x H sensor over the window [t_start, t_end].

    ``events`` is a structured array with fields x, y, t, p (see
    ``EVENT_DTYPE``).  Timestamps are microseconds and must be
    non-decreasing; every event must lie inside the window and the sensor
    bounds.  Use :meth:`validate` to check a stream built from raw arrays.
    """

    events: np.ndarray
    width: int
    height: int
    t_start: int
    t_end: int

    @classmethod
    def from_events(cls, events: Iterable[Event], width: int, height: int,
                    t_start: int, t_end: int) -> "EventStream":
        rec = np.array([tuple(e) for e in events], dtype=EVENT_DTYPE)
        if rec.size == 0:
            rec = np.empty(0, dtype=EVENT_DTYPE)
        return cls(rec, width, height, t_start, t_end)

    def __len__(self) -> int:
        return len(self.events)

    def validate(self) -> None:
        """Raise ConfigError/DataError if any invariant is violated."""
        if self.t_start >= self.t_end:
            raise ConfigError(
                f"invalid window: t_start={self.t_start} >= t_end={self.t_end}")
        ev = self.events
        if len(ev) == 0:
            return
        xs = ev["x"].astype(np.int64)
        ys = ev["y"].astype(np.int64)
        ts = ev["t"].astype(np.int64)
        bad = np.nonzero((xs < 0) | (xs >= self.width)
                         | (ys < 0) | (ys >= self.height))[0]
        if bad.size:
            i = int(bad[0])
            raise DataError(
                f"event {i} out of sensor bounds: "
                f"(x={xs[i]}, y={ys[i]}) for sensor {self.width}x{self.height}",
                index=i)
        bad = np.nonzero(ev["p"] > 1)[0]
        if bad.size:
            i = int(bad[0])
            raise DataError(
                f"event {i} has polarity {ev['p'][i]}, expected 0 or 1",
                index=i)
        bad = np.nonzero((ts < self.t_start) | (ts > self.t_end))[0]
        if bad.size:
            i = int(bad[0])
            raise DataError(
                f"event {i} outside window: t={ts[i]} not in "
                f"[{self.t_start}, {self.t_end}]", index=i)
        if np.any(np.diff(ts) < 0):
            i = int(np.nonzero(np.diff(ts) < 0)[0][0]) + 1
            raise DataError(f"event {i} breaks timestamp monotonicity",
                            index=i)


@dataclass
class EventHistogram:
    """Dense event counts, shape (T, 2, H, W), float32, all values >= 0.

    Cells hold integer counts straight after binning; resizing and noise
    scaling legitimately produce fractional values, so one real-valued
    cell type is used throughout.
    """

    data: np.ndarray = field()

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float32)
        if self.data.ndim != 4 or self.data.shape[1] != 2:
            raise DataError(
                f"histogram must have shape (T, 2, H, W), got {self.data.shape}")

    @property
    def timesteps(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[2]

    @property
    def width(self) -> int:
        return self.data.shape[3]

    @classmethod
    def zeros(cls, timesteps: int, height: int, width: int) -> "EventHistogram":
        return cls(np.zeros((timesteps, 2, height, width), dtype=np.float32))


def build_histogram(stream: EventStream, timesteps: int) -> EventHistogram:
    """Bin a stream into an EventHistogram with ``timesteps`` bins.

    An event at time t lands in bin floor((t - t_start) / (t_end -
    t_start) * T); the bin index is computed with exact integer
    arithmetic.  Events at exactly t_end would index bin T, which does
    not exist, and are clamped into the last bin so every in-window event
    is represented.
    """
    if timesteps < 1:
        raise ConfigError(f"timesteps must be >= 1, got {timesteps}")
    stream.validate()
    hist = EventHistogram.zeros(timesteps, stream.height, stream.width)
    ev = stream.events
    if len(ev) == 0:
        return hist
    span = stream.t_end - stream.t_start
    rel = ev["t"].astype(np.int64) - stream.t_start
    if span <= (2**62) // timesteps:
        tau = (rel * timesteps) // span
    else:
        # Window too long for int64 products; exact arbitrary-precision path.
        tau = np.array([(int(r) * timesteps) // span for r in rel], dtype=np.int64)
    np.minimum(tau, timesteps - 1, out=tau)
    np.add.at(hist.data,
              (tau, ev["p"].astype(np.int64),
               ev["y"].astype(np.int64), ev["x"].astype(np.int64)),
              np.float32(1.0))
    return hist


def resize_bilinear(hist: EventHistogram, new_height: int,
                    new_width: int) -> EventHistogram:
    """Resize every (t, p) slice with bilinear interpolation.

    Sample positions follow the pixel-center (align-corners=false)
    convention: output pixel i samples source coordinate
    (i + 0.5) * src/dst - 0.5, clamped to the valid range.  An identity
    resize returns the input values exactly, and constant slices stay
    constant at any target size.
    """
    if new_height < 1 or new_width < 1:
        raise ConfigError(
            f"resize target must be positive, got {new_height}x{new_width}")
    t, _, h, w = hist.data.shape
    y0, y1, wy = _resample_axis(h, new_height)
    x0, x1, wx = _resample_axis(w, new_width)

    src = hist.data.astype(np.float64)
    a = src[:, :, y0[:, None], x0[None, :]]
    b = src[:, :, y0[:, None], x1[None, :]]
    c = src[:, :, y1[:, None], x0[None, :]]
    d = src[:, :, y1[:, None], x1[None, :]]
    # a + w*(b - a) keeps constants and grid-aligned samples exact.
    top = a + wx[None, :] * (b - a)
    bot = c + wx[None, :] * (d - c)
    out = top + wy[:, None] * (bot - top)
    return EventHistogram(out.astype(np.float32))


def _resample_axis(src: int, dst: int):
    pos = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
    np.clip(pos, 0.0, src - 1.0, out=pos)
    i0 = np.floor(pos).astype(np.int64)
    i1 = np.minimum(i0 + 1, src - 1)
    return i0, i1, pos - i0


def merge_histograms(a: EventHistogram, b: EventHistogram) -> EventHistogram:
    """Element-wise sum of two equal-shape histograms."""
    if a.data.shape != b.data.shape:
        raise DataError(
            f"histogram shape mismatch: {a.data.shape} vs {b.data.shape}")
    return EventHistogram(a.data + b.data)
