"""Command-line interface.

Subcommands: ``augment`` (batch-augment event files), ``visualize``
(per-timestep PNG dumps), ``bench`` (throughput measurement), and
``gen-scene`` (render a scene without any input data).  Results go to
stdout, diagnostics to stderr.  Exit codes: 0 success, 1 parse/config
errors, 2 I/O errors.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from time import perf_counter

from . import __version__
from .errors import ConfigError, FormatError, ShapeAugError
from .events import EventHistogram, build_histogram
from .io_formats import (EVENTS_FORMAT_VERSION, EVENTS_MAGIC,
                         HISTOGRAM_FORMAT_VERSION, HISTOGRAM_MAGIC,
                         export_frames_png, read_config, read_events,
                         read_histogram, write_histogram)
from .pipeline import (AugConfig, GeoParams, MODE_LEGACY, MODE_NONE,
                       MODE_SHAPEAUGPP, augment, augment_detail, derive_rng,
                       sample_shape_motion)
from .render import render_sequence

_CLI_MODES = {"shapeaugpp": MODE_SHAPEAUGPP, "legacy": MODE_LEGACY,
              "none": MODE_NONE}


def version_string() -> str:
    return (f"shapeaug {__version__} "
            f"(formats: events v{EVENTS_FORMAT_VERSION}, "
            f"histogram v{HISTOGRAM_FORMAT_VERSION})")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; our contract reserves 2
    # for I/O problems, so funnel parse failures through an exception.
    def error(self, message):
        raise _UsageError(message)


def _size(value: str) -> tuple[int, int]:
    try:
        h, w = value.lower().split("x")
        h, w = int(h), int(w)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected HxW (e.g. 80x80), got {value!r}") from None
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError(f"size must be positive, got {value}")
    return h, w


def _add_aug_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=sorted(_CLI_MODES),
                   help="augmentation mode (default shapeaugpp)")
    p.add_argument("--smax", type=float, help="max shape size in px")
    p.add_argument("--smin", type=float, help="min shape size in px")
    p.add_argument("--max-shapes", type=int, help="max shapes per sample")
    p.add_argument("--timesteps", type=int, help="histogram timestep count")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--geo", action="store_true",
                   help="enable the geometric stage (pad/crop/flip/rotate)")
    p.add_argument("--config", type=Path, metavar="FILE",
                   help="key=value config file; explicit flags override it")


def build_parser() -> _Parser:
    parser = _Parser(prog="shapeaug",
                     description="Occlusion augmentation for event data.")
    parser.add_argument("--version", action="version",
                        version=version_string())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="augment event files into histograms")
    p.add_argument("--input", type=Path, required=True,
                   help="event/histogram file, or a directory of them")
    p.add_argument("--output", type=Path, required=True,
                   help="output directory for augmented histograms")
    _add_aug_flags(p)
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (results independent of this)")
    p.add_argument("--base-index", type=int, default=0,
                   help="sample index of the first input file")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("visualize", help="dump per-timestep PNGs")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--augment", action="store_true",
                   help="also render the augmentation's frames and events")
    _add_aug_flags(p)
    p.add_argument("--base-index", type=int, default=0)
    p.set_defaults(func=cmd_visualize)

    p = sub.add_parser("bench", help="measure augmentation throughput")
    p.add_argument("--size", type=_size, default=(80, 80), metavar="HxW")
    p.add_argument("--timesteps", type=int, default=10)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--mode", choices=sorted(_CLI_MODES), default="shapeaugpp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-dir", type=Path, metavar="DIR",
                   help="also write bench.txt and a stage-breakdown figure")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-scene",
                       help="render a random scene without input data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--smax", type=float)
    p.add_argument("--smin", type=float)
    p.add_argument("--max-shapes", type=int)
    p.add_argument("--mode", choices=sorted(_CLI_MODES))
    p.add_argument("--size", type=_size, default=(80, 80), metavar="HxW")
    p.add_argument("--timesteps", type=int)
    p.add_argument("--output", type=Path, required=True)
    p.set_defaults(func=cmd_gen_scene)

    return parser


def _resolve_config(args) -> AugConfig:
    """Defaults < config file < explicit flags."""
    cfg = read_config(args.config) if getattr(args, "config", None) else \
        AugConfig()
    updates = {}
    if getattr(args, "mode", None) is not None:
        updates["mode"] = _CLI_MODES[args.mode]
    if getattr(args, "smax", None) is not None:
        updates["s_max"] = args.smax
    if getattr(args, "smin", None) is not None:
        updates["s_min"] = args.smin
    if getattr(args, "max_shapes", None) is not None:
        updates["max_shapes"] = args.max_shapes
    if getattr(args, "timesteps", None) is not None:
        updates["timesteps"] = args.timesteps
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "geo", False) and cfg.geo is None:
        updates["geo"] = GeoParams()
    return replace(cfg, **updates)


def _sniff_kind(path: Path) -> str:
    """'events' or 'histogram', from the suffix or the magic bytes."""
    if path.suffix.lower() == ".csv":
        return "events"
    with open(path, "rb") as f:
        magic = f.read(4)
    if magic == EVENTS_MAGIC:
        return "events"
    if magic == HISTOGRAM_MAGIC:
        return "histogram"
    raise FormatError(f"{path}: unrecognized magic {magic!r}", offset=0)


def _load_as_histogram(path: Path, cfg: AugConfig,
                       adopt_timesteps: bool) -> tuple[EventHistogram,
                                                       AugConfig]:
    """Read a file as a histogram, binning events if needed.

    When ``adopt_timesteps`` is set (no --timesteps flag, no config
    file) a histogram input's own T becomes the effective timestep
    count.
    """
    if _sniff_kind(path) == "events":
        return build_histogram(read_events(path), cfg.timesteps), cfg
    hist = read_histogram(path)
    if adopt_timesteps and hist.timesteps != cfg.timesteps:
        cfg = replace(cfg, timesteps=hist.timesteps)
    return hist, cfg


def _input_files(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file())
        if not files:
            raise ConfigError(f"no input files in directory {path}")
        return files
    if not path.exists():
        raise FileNotFoundError(f"input not found: {path}")
    return [path]


def cmd_augment(args) -> int:
    cfg = _resolve_config(args)
    adopt = args.timesteps is None and args.config is None
    files = _input_files(args.input)
    args.output.mkdir(parents=True, exist_ok=True)

    def one(i: int) -> tuple[str, float]:
        f = files[i]
        hist, eff_cfg = _load_as_histogram(f, cfg, adopt)
        tic = perf_counter()
        out = augment(hist, eff_cfg, args.base_index + i)
        ms = (perf_counter() - tic) * 1000.0
        write_histogram(out, args.output / (f.stem + ".evh1"))
        return f.name, ms

    tic = perf_counter()
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(one, range(len(files))))
    else:
        results = [one(i) for i in range(len(files))]
    total_ms = (perf_counter() - tic) * 1000.0
    for name, ms in results:
        print(f"{name}: {ms:.3f} ms")
    rate = len(files) / (total_ms / 1000.0) if total_ms > 0 else float("inf")
    print(f"augmented {len(results)} file(s) in {total_ms:.3f} ms "
          f"({rate:.1f} samples/sec)")
    return 0


def cmd_visualize(args) -> int:
    cfg = _resolve_config(args)
    adopt = args.timesteps is None and args.config is None
    hist, cfg = _load_as_histogram(args.input, cfg, adopt)
    written = export_frames_png(hist, args.output, "input")
    if args.augment:
        res = augment_detail(hist, cfg, args.base_index)
        if res.sequence is not None:
            written += export_frames_png(res.sequence, args.output, "frames",
                                         start=1)
            written += export_frames_png(res.simulated, args.output, "events")
    for p in written:
        print(p)
    return 0


def cmd_bench(args) -> int:
    H, W = args.size
    cfg = AugConfig(mode=_CLI_MODES[args.mode], timesteps=args.timesteps,
                    seed=args.seed)
    base = EventHistogram.zeros(args.timesteps, H, W)
    n = args.iterations

    def one(i: int) -> tuple[float, dict, bytes]:
        timings: dict = {}
        tic = perf_counter()
        out = augment(base, cfg, i, timings)
        ms = (perf_counter() - tic) * 1000.0
        return ms, timings, hashlib.sha256(out.data.tobytes()).digest()

    tic = perf_counter()
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(one, range(n)))
    else:
        results = [one(i) for i in range(n)]
    total_ms = (perf_counter() - tic) * 1000.0

    # Checksum of all outputs in index order, independent of scheduling.
    acc = hashlib.sha256()
    for _, _, digest in results:
        acc.update(digest)
    stage_ms: dict[str, float] = {}
    for _, timings, _ in results:
        for key, sec in timings.items():
            stage_ms[key] = stage_ms.get(key, 0.0) + sec * 1000.0
    # Single-threaded rate counts augmentation time only (the per-sample
    # lines sum to it); with threads the wall clock is the honest basis.
    aug_ms = sum(r[0] for r in results)
    basis_ms = aug_ms if args.threads <= 1 else total_ms
    rate = n / (basis_ms / 1000.0) if basis_ms > 0 else float("inf")

    lines = [
        f"# {rate:.1f} samples/sec over {n} iterations "
        f"({args.threads} thread(s))",
        f"iterations={n}",
        f"threads={args.threads}",
        f"size={H}x{W}",
        f"timesteps={args.timesteps}",
        f"mode={args.mode}",
        f"seed={args.seed}",
        f"samples_per_sec={rate:.3f}",
        f"total_ms={total_ms:.3f}",
        f"checksum={acc.hexdigest()}",
    ]
    lines += [f"stage_{key}_ms={stage_ms[key]:.3f}"
              for key in sorted(stage_ms)]
    lines += [f"sample_{i:05d}_ms={results[i][0]:.3f}" for i in range(n)]
    print("\n".join(lines))
    if args.report_dir is not None:
        _write_bench_report(args.report_dir, lines, stage_ms, rate)
    return 0


def _write_bench_report(report_dir: Path, lines: list[str],
                        stage_ms: dict[str, float], rate: float) -> None:
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / "bench.txt").write_text("\n".join(lines) + "\n")
    import matplotlib  # deferred: only the report path needs it
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    order = ["geo", "scene_gen", "raster", "diff", "noise", "mask"]
    names = [k for k in order if k in stage_ms]
    names += [k for k in sorted(stage_ms) if k not in order]
    vals = [stage_ms[k] for k in names]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.bar(names, vals, color="#4878d0")
    ax.set_ylabel("total ms")
    ax.set_title(f"stage breakdown ({rate:.0f} samples/sec)")
    fig.tight_layout()
    fig.savefig(report_dir / "bench_stages.png", dpi=120)
    plt.close(fig)


def _fmt_point(p) -> str:
    return f"({float(p[0])!r}, {float(p[1])!r})"


def cmd_gen_scene(args) -> int:
    H, W = args.size
    updates = {}
    if args.mode is not None:
        updates["mode"] = _CLI_MODES[args.mode]
    if args.smax is not None:
        updates["s_max"] = args.smax
    if args.smin is not None:
        updates["s_min"] = args.smin
    if args.max_shapes is not None:
        updates["max_shapes"] = args.max_shapes
    if args.timesteps is not None:
        updates["timesteps"] = args.timesteps
    cfg = replace(AugConfig(seed=args.seed), **updates)
    if cfg.mode == MODE_NONE:
        raise ConfigError("gen-scene needs a shape mode, not 'none'")

    rng = derive_rng(cfg.seed, 0)
    scene, paths = sample_shape_motion(rng, cfg, W, H)
    seq = render_sequence(scene, paths, cfg.timesteps, W, H)

    lines = [f"seed={cfg.seed}", f"size={H}x{W}",
             f"timesteps={cfg.timesteps}", f"mode={cfg.mode}",
             f"background={scene.background_color!r}",
             f"n_shapes={scene.n_shapes}"]
    for i, (shape, path) in enumerate(zip(scene.shapes, paths)):
        lines.append(f"shape_{i}.kind={shape.kind}")
        lines.append(f"shape_{i}.center={_fmt_point(shape.center)}")
        lines.append(f"shape_{i}.size={shape.size!r}")
        lines.append(f"shape_{i}.color={shape.color!r}")
        lines.append(f"shape_{i}.hull=" + " ".join(
            _fmt_point(v) for v in shape.hull))
        lines.append(f"path_{i}.p0={_fmt_point(path.p0)}")
        lines.append(f"path_{i}.p1={_fmt_point(path.p1)}")
        lines.append(f"path_{i}.p2={_fmt_point(path.p2)}")
        lines.append(f"path_{i}.gamma={path.gamma!r}")
    text = "\n".join(lines)
    args.output.mkdir(parents=True, exist_ok=True)
    (args.output / "scene.txt").write_text(text + "\n")
    export_frames_png(seq, args.output, "frame")
    print(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --version / --help
        return 0 if exc.code in (0, None) else int(exc.code)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ShapeAugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
