"""File formats: binary event streams, binary histograms, CSV events,
key=value configs, and PNG export.

Both binary formats are little-endian and fixed-width so round-trips are
bit-exact and testable byte-for-byte:

* events ("EVS1"): 34-byte header -- magic 4s, version u16, width u16,
  height u16, count u64, t_start u64, t_end u64 -- followed by ``count``
  packed 13-byte records (x u16, y u16, t u64, p u8).
* histograms ("EVH1"): 22-byte header -- magic 4s, version u16, then
  T, C, H, W as u32 (C is always 2) -- followed by T*C*H*W float32
  values in (t, c, y, x) row-major order.

Parsers reject malformed input with the byte offset (binary) or line
number (text) of the problem.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, FormatError
from .events import EVENT_DTYPE, EventHistogram, EventStream
from .pipeline import AugConfig, GeoParams
from .render import FrameSequence
from .simulate import NoiseParams

EVENTS_MAGIC = b"EVS1"
HISTOGRAM_MAGIC = b"EVH1"
EVENTS_FORMAT_VERSION = 1
HISTOGRAM_FORMAT_VERSION = 1

_EVENTS_HEADER = struct.Struct("<4sHHHQQQ")
_HIST_HEADER = struct.Struct("<4sHIIII")
_RECORD_SIZE = EVENT_DTYPE.itemsize  # 13

_CSV_COLUMNS = ["x", "y", "t", "p"]


# ---------------------------------------------------------------------------
# event streams

def write_events(stream: EventStream, path) -> None:
    """Write a stream to ``path``; ``.csv`` suffix selects CSV, else binary."""
    stream.validate()
    path = Path(path)
    if path.suffix.lower() == ".csv":
        _write_events_csv(stream, path)
        return
    header = _EVENTS_HEADER.pack(EVENTS_MAGIC, EVENTS_FORMAT_VERSION,
                                 stream.width, stream.height, len(stream),
                                 stream.t_start, stream.t_end)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(stream.events).tobytes())


def read_events(path, *, width: int | None = None, height: int | None = None,
                t_start: int | None = None,
                t_end: int | None = None) -> EventStream:
    """Read a stream from a binary or CSV file.

    The binary format is self-describing; the metadata keywords apply to
    CSV only, where they fill in what the file cannot carry.  Omitted
    CSV metadata is inferred: width/height as max coordinate + 1,
    t_start as 0, t_end as the last timestamp + 1 (so every event bins
    strictly inside the window); empty CSV files infer a 1x1 sensor and
    a [0, 1) window.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _read_events_csv(path, width, height, t_start, t_end)
    data = path.read_bytes()
    if len(data) < _EVENTS_HEADER.size:
        raise FormatError(
            f"event file too short for header ({len(data)} bytes)",
            offset=len(data))
    magic, version, w, h, count, ts, te = _EVENTS_HEADER.unpack_from(data)
    if magic != EVENTS_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {EVENTS_MAGIC!r}",
                          offset=0)
    if version != EVENTS_FORMAT_VERSION:
        raise FormatError(
            f"unsupported event format version {version}", offset=4)
    if ts >= te:
        raise FormatError(f"t_start={ts} >= t_end={te}", offset=18)
    expected = _EVENTS_HEADER.size + count * _RECORD_SIZE
    if len(data) < expected:
        raise FormatError(
            f"truncated: header declares {count} events "
            f"({expected} bytes), file has {len(data)}", offset=len(data))
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes",
                          offset=expected)
    rec = np.frombuffer(data, dtype=EVENT_DTYPE, count=count,
                        offset=_EVENTS_HEADER.size).copy()
    stream = EventStream(rec, w, h, ts, te)
    try:
        stream.validate()
    except DataError as exc:
        off = _EVENTS_HEADER.size
        if exc.index is not None:
            off += exc.index * _RECORD_SIZE
        raise FormatError(str(exc), offset=off) from exc
    return stream


def _write_events_csv(stream: EventStream, path: Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(_CSV_COLUMNS)
        for rec in stream.events:
            writer.writerow([int(rec["x"]), int(rec["y"]),
                             int(rec["t"]), int(rec["p"])])


def _read_events_csv(path: Path, width, height, t_start, t_end) -> EventStream:
    rows = []
    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise FormatError("empty CSV, expected header 'x,y,t,p'", line=1)
        if [c.strip() for c in header] != _CSV_COLUMNS:
            raise FormatError(
                f"bad CSV header {header!r}, expected 'x,y,t,p'", line=1)
        for row in reader:
            if not row:
                continue
            if len(row) != 4:
                raise FormatError(f"expected 4 columns, got {len(row)}",
                                  line=reader.line_num)
            try:
                vals = [int(c) for c in row]
            except ValueError:
                raise FormatError(f"non-integer field in {row!r}",
                                  line=reader.line_num) from None
            if not (0 <= vals[0] <= 0xFFFF and 0 <= vals[1] <= 0xFFFF
                    and vals[2] >= 0 and vals[3] in (0, 1)):
                raise FormatError(f"field out of range in {row!r}",
                                  line=reader.line_num)
            rows.append(tuple(vals))
    rec = np.array(rows, dtype=EVENT_DTYPE) if rows else \
        np.empty(0, dtype=EVENT_DTYPE)
    if width is None:
        width = int(rec["x"].max()) + 1 if len(rec) else 1
    if height is None:
        height = int(rec["y"].max()) + 1 if len(rec) else 1
    if t_start is None:
        t_start = 0
    if t_end is None:
        t_end = int(rec["t"].max()) + 1 if len(rec) else 1
    stream = EventStream(rec, width, height, t_start, t_end)
    try:
        stream.validate()
    except DataError as exc:
        line = None if exc.index is None else exc.index + 2
        raise FormatError(str(exc), line=line) from exc
    return stream


# ---------------------------------------------------------------------------
# histograms

def write_histogram(hist: EventHistogram, path) -> None:
    t, c, h, w = hist.data.shape
    header = _HIST_HEADER.pack(HISTOGRAM_MAGIC, HISTOGRAM_FORMAT_VERSION,
                               t, c, h, w)
    payload = np.ascontiguousarray(hist.data, dtype="<f4")
    with open(path, "wb") as f:
        f.write(header)
        f.write(payload.tobytes())


def read_histogram(path) -> EventHistogram:
    data = Path(path).read_bytes()
    if len(data) < _HIST_HEADER.size:
        raise FormatError(
            f"histogram file too short for header ({len(data)} bytes)",
            offset=len(data))
    magic, version, t, c, h, w = _HIST_HEADER.unpack_from(data)
    if magic != HISTOGRAM_MAGIC:
        raise FormatError(
            f"bad magic {magic!r}, expected {HISTOGRAM_MAGIC!r}", offset=0)
    if version != HISTOGRAM_FORMAT_VERSION:
        raise FormatError(
            f"unsupported histogram format version {version}", offset=4)
    if c != 2:
        raise FormatError(f"channel count must be 2, got {c}", offset=10)
    if t < 1 or h < 1 or w < 1:
        raise FormatError(f"bad dimensions ({t}, {c}, {h}, {w})", offset=6)
    expected = _HIST_HEADER.size + t * c * h * w * 4
    if len(data) < expected:
        raise FormatError(
            f"truncated: header declares shape ({t}, {c}, {h}, {w}) "
            f"({expected} bytes), file has {len(data)}", offset=len(data))
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes",
                          offset=expected)
    values = np.frombuffer(data, dtype="<f4", count=t * c * h * w,
                           offset=_HIST_HEADER.size)
    return EventHistogram(values.reshape(t, c, h, w).copy())


# ---------------------------------------------------------------------------
# config files

# Explicit schemas: the file syntax is stable API, so the mapping from
# key to type is spelled out rather than introspected.
_TOP_SCHEMA = {
    "mode": str, "max_shapes": int, "s_min": float, "s_max": float,
    "timesteps": int, "seed": int, "control_point_relative": bool,
    "mask_union": bool,
}
_NOISE_SCHEMA = {
    "count_jitter_lo": float, "count_jitter_hi": float, "p_zero": float,
    "clip_base": float, "clip_rand_lo": float, "clip_rand_hi": float,
    "event_scale": float, "enabled": bool,
}
_GEO_SCHEMA = {
    "pad": int, "crop_h": int, "crop_w": int, "p_hflip": float,
    "max_rotate_deg": float,
}


def _parse_value(key: str, raw: str, typ, line: int):
    if typ is bool:
        low = raw.lower()
        if low in ("true", "false"):
            return low == "true"
        raise FormatError(
            f"{key} expects true/false, got {raw!r}", line=line)
    try:
        return typ(raw)
    except ValueError:
        raise FormatError(
            f"{key} expects {typ.__name__}, got {raw!r}", line=line) from None


def read_config(path) -> AugConfig:
    """Parse a key=value config file into an AugConfig.

    Blank lines and '#' comments are ignored.  Nested sections use
    dotted keys (noise.p_zero, geo.pad); the presence of any geo.* key
    enables the geometric stage.  Unknown and duplicate keys are
    rejected.
    """
    top: dict = {}
    noise: dict = {}
    geo: dict = {}
    seen: set[str] = set()
    with open(path) as f:
        for n, rawline in enumerate(f, start=1):
            text = rawline.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise FormatError(f"expected key=value, got {text!r}", line=n)
            key, _, raw = text.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key in seen:
                raise FormatError(f"duplicate key {key!r}", line=n)
            seen.add(key)
            if key in _TOP_SCHEMA:
                top[key] = _parse_value(key, raw, _TOP_SCHEMA[key], n)
            elif key.startswith("noise.") and key[6:] in _NOISE_SCHEMA:
                sub = key[6:]
                noise[sub] = _parse_value(key, raw, _NOISE_SCHEMA[sub], n)
            elif key.startswith("geo.") and key[4:] in _GEO_SCHEMA:
                sub = key[4:]
                geo[sub] = _parse_value(key, raw, _GEO_SCHEMA[sub], n)
            else:
                raise ConfigError(f"unknown config key {key!r} (line {n})")
    top["noise"] = NoiseParams(**noise)
    if geo:
        top["geo"] = GeoParams(**geo)
    return AugConfig(**top)


def write_config(cfg: AugConfig, path) -> None:
    """Write a config file that read_config parses back to an equal cfg."""
    lines = []
    for key in _TOP_SCHEMA:
        lines.append(f"{key}={_format_value(getattr(cfg, key))}")
    for key in _NOISE_SCHEMA:
        lines.append(f"noise.{key}={_format_value(getattr(cfg.noise, key))}")
    if cfg.geo is not None:
        for key in _GEO_SCHEMA:
            lines.append(f"geo.{key}={_format_value(getattr(cfg.geo, key))}")
    Path(path).write_text("\n".join(lines) + "\n")


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


# ---------------------------------------------------------------------------
# PNG export

def export_frames_png(obj, out_dir, prefix: str = "frame", *,
                      start: int = 0) -> list[Path]:
    """Write one PNG per timestep/frame of ``obj``; returns the paths.

    EventHistogram: neutral gray 128 background, positive counts push
    the red channel up, negative counts the blue channel, both scaled so
    the tensor maximum hits full intensity.  FrameSequence: plain 8-bit
    grayscale.  ``start`` skips leading frames (e.g. start=1 exports the
    T moved frames of a T+1-frame sequence).  Files are named
    ``{prefix}_{index:03d}.png`` with indices starting at 0.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    from PIL import Image  # deferred: image export is off the hot path

    paths = []
    if isinstance(obj, EventHistogram):
        scale = 127.0 / max(1.0, float(obj.data.max()))
        for i, k in enumerate(range(start, obj.timesteps)):
            neg = obj.data[k, 0]
            pos = obj.data[k, 1]
            img = np.full(neg.shape + (3,), 128, dtype=np.uint8)
            img[:, :, 0] += np.floor(pos * scale + 0.5).astype(np.uint8)
            img[:, :, 2] += np.floor(neg * scale + 0.5).astype(np.uint8)
            p = out_dir / f"{prefix}_{i:03d}.png"
            Image.fromarray(img).save(p)
            paths.append(p)
    elif isinstance(obj, FrameSequence):
        for i, k in enumerate(range(start, len(obj))):
            gray = np.floor(obj.intensity[k] * 255.0 + 0.5).astype(np.uint8)
            p = out_dir / f"{prefix}_{i:03d}.png"
            Image.fromarray(gray, mode="L").save(p)
            paths.append(p)
    else:
        raise TypeError(
            f"expected EventHistogram or FrameSequence, got {type(obj)!r}")
    return paths
