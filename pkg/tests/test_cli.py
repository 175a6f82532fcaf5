"""Command-line behavior: exit codes, determinism, output contracts."""

import subprocess
import sys

import numpy as np
from pytest import raises

from shapeaug.cli import main, version_string
from shapeaug.events import EventHistogram, EventStream, build_histogram
from shapeaug.io_formats import (
    read_events,
    read_histogram,
    write_config,
    write_events,
    write_histogram,
)
from shapeaug.pipeline import AugConfig


def small_stream():
    from shapeaug.events import Event

    evs = [Event(1, 1, 5, 1), Event(3, 2, 20, 0), Event(0, 3, 35, 1),
           Event(2, 0, 90, 0)]
    return EventStream.from_events(evs, 6, 5, 0, 100)


def random_hist(seed, T=4, H=12, W=10):
    rng = np.random.default_rng(seed)
    return EventHistogram(rng.integers(0, 5, size=(T, 2, H, W))
                          .astype(np.float32))


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    out = capsys.readouterr().out
    assert version_string() in out
    assert "formats" in out


def test_usage_errors_exit_1(capsys):
    assert main(["no-such-command"]) == 1
    assert main(["bench", "--size", "banana"]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_input_exits_2(tmp_path, capsys):
    rc = main(["augment", "--input", str(tmp_path / "nope.evs1"),
               "--output", str(tmp_path / "out")])
    assert rc == 2
    assert "I/O error" in capsys.readouterr().err


def test_unrecognized_file_exits_1(tmp_path, capsys):
    bad = tmp_path / "junk.evs1"
    bad.write_bytes(b"JUNKJUNKJUNK")
    rc = main(["augment", "--input", str(bad),
               "--output", str(tmp_path / "out")])
    assert rc == 1
    assert "magic" in capsys.readouterr().err


def test_augment_mode_none_is_binning_identity(tmp_path, capsys):
    src = tmp_path / "in.evs1"
    write_events(small_stream(), src)
    out_dir = tmp_path / "out"
    rc = main(["augment", "--input", str(src), "--output", str(out_dir),
               "--mode", "none", "--timesteps", "4"])
    assert rc == 0
    produced = read_histogram(out_dir / "in.evh1")
    want = build_histogram(read_events(src), 4)
    assert np.array_equal(produced.data, want.data)
    stdout = capsys.readouterr().out
    assert "in.evs1" in stdout
    assert "augmented 1 file(s)" in stdout


def test_augment_adopts_histogram_timesteps(tmp_path):
    hist = random_hist(3, T=6)
    src = tmp_path / "h.evh1"
    write_histogram(hist, src)
    out_dir = tmp_path / "out"
    assert main(["augment", "--input", str(src), "--output", str(out_dir),
                 "--mode", "none"]) == 0
    assert np.array_equal(read_histogram(out_dir / "h.evh1").data, hist.data)


def test_augment_deterministic_across_runs(tmp_path):
    src = tmp_path / "h.evh1"
    write_histogram(random_hist(1), src)
    outs = []
    for d in ("a", "b"):
        assert main(["augment", "--input", str(src),
                     "--output", str(tmp_path / d), "--seed", "5"]) == 0
        outs.append((tmp_path / d / "h.evh1").read_bytes())
    assert outs[0] == outs[1]
    assert main(["augment", "--input", str(src),
                 "--output", str(tmp_path / "c"), "--seed", "5",
                 "--base-index", "1"]) == 0
    assert (tmp_path / "c" / "h.evh1").read_bytes() != outs[0]


def test_augment_directory_thread_invariance(tmp_path):
    src_dir = tmp_path / "in"
    src_dir.mkdir()
    for i in range(3):
        write_histogram(random_hist(10 + i), src_dir / f"s{i}.evh1")
    for threads, d in (("1", "t1"), ("3", "t3")):
        assert main(["augment", "--input", str(src_dir),
                     "--output", str(tmp_path / d), "--seed", "9",
                     "--threads", threads]) == 0
    for i in range(3):
        a = (tmp_path / "t1" / f"s{i}.evh1").read_bytes()
        b = (tmp_path / "t3" / f"s{i}.evh1").read_bytes()
        assert a == b


def test_augment_config_file_and_flag_override(tmp_path):
    src = tmp_path / "h.evh1"
    hist = random_hist(2)
    write_histogram(hist, src)
    cfg_file = tmp_path / "cfg.txt"
    write_config(AugConfig(mode="none", timesteps=4), cfg_file)

    assert main(["augment", "--input", str(src),
                 "--output", str(tmp_path / "plain"),
                 "--config", str(cfg_file)]) == 0
    plain = read_histogram(tmp_path / "plain" / "h.evh1")
    assert np.array_equal(plain.data, hist.data)  # config mode=none held

    assert main(["augment", "--input", str(src),
                 "--output", str(tmp_path / "forced"),
                 "--config", str(cfg_file), "--mode", "shapeaugpp"]) == 0
    forced = read_histogram(tmp_path / "forced" / "h.evh1")
    assert not np.array_equal(forced.data, hist.data)  # flag overrode it


def test_visualize_file_counts(tmp_path, capsys):
    src = tmp_path / "h.evh1"
    write_histogram(random_hist(4, T=10, H=20, W=20), src)
    plain = tmp_path / "plain"
    assert main(["visualize", "--input", str(src),
                 "--output", str(plain)]) == 0
    assert len(list(plain.glob("input_*.png"))) == 10
    assert len(list(plain.glob("*.png"))) == 10

    full = tmp_path / "full"
    assert main(["visualize", "--input", str(src), "--output", str(full),
                 "--augment", "--seed", "3"]) == 0
    assert len(list(full.glob("input_*.png"))) == 10
    assert len(list(full.glob("frames_*.png"))) == 10
    assert len(list(full.glob("events_*.png"))) == 10
    listed = [ln for ln in capsys.readouterr().out.splitlines() if ln]
    assert len(listed) >= 40  # 10 plain + 30 augmented paths


def parse_kv(stdout):
    kv = {}
    for line in stdout.splitlines():
        if "=" in line and not line.startswith("#"):
            k, _, v = line.partition("=")
            kv[k] = v
    return kv


def test_bench_output_contract(tmp_path, capsys):
    rc = main(["bench", "--size", "32x32", "--timesteps", "4",
               "--iterations", "8", "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("# ")
    kv = parse_kv(out)
    assert kv["iterations"] == "8"
    assert kv["size"] == "32x32"
    assert float(kv["samples_per_sec"]) > 0
    assert len(kv["checksum"]) == 64
    assert "sample_00007_ms" in kv
    assert "stage_raster_ms" in kv and "stage_noise_ms" in kv


def test_bench_checksum_ignores_threads(capsys):
    args = ["bench", "--size", "24x24", "--timesteps", "3",
            "--iterations", "6", "--seed", "7"]
    assert main(args) == 0
    one = parse_kv(capsys.readouterr().out)["checksum"]
    assert main(args + ["--threads", "2"]) == 0
    two = parse_kv(capsys.readouterr().out)["checksum"]
    assert one == two


def test_bench_report_dir(tmp_path, capsys):
    report = tmp_path / "report"
    assert main(["bench", "--size", "24x24", "--timesteps", "3",
                 "--iterations", "4", "--report-dir", str(report)]) == 0
    stdout = capsys.readouterr().out
    assert (report / "bench.txt").read_text() == stdout
    png = (report / "bench_stages.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_gen_scene_outputs(tmp_path, capsys):
    out1 = tmp_path / "a"
    assert main(["gen-scene", "--seed", "11", "--size", "40x40",
                 "--timesteps", "5", "--output", str(out1)]) == 0
    stdout = capsys.readouterr().out
    assert (out1 / "scene.txt").read_text().rstrip("\n") == stdout.rstrip("\n")
    assert len(list(out1.glob("frame_*.png"))) == 6  # T+1 frames
    kv = parse_kv(stdout)
    assert kv["seed"] == "11" and kv["n_shapes"].isdigit()
    assert "shape_0.kind" in kv and "path_0.gamma" in kv

    out2 = tmp_path / "b"
    assert main(["gen-scene", "--seed", "11", "--size", "40x40",
                 "--timesteps", "5", "--output", str(out2)]) == 0
    assert (out2 / "scene.txt").read_text() == (out1 / "scene.txt").read_text()


def test_gen_scene_rejects_mode_none(tmp_path, capsys):
    rc = main(["gen-scene", "--mode", "none",
               "--output", str(tmp_path / "x")])
    assert rc == 1
    assert "mode" in capsys.readouterr().err


def test_console_entry_subprocess(tmp_path):
    r = subprocess.run([sys.executable, "-m", "shapeaug", "--version"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "shapeaug" in r.stdout
    r = subprocess.run([sys.executable, "-m", "shapeaug", "augment",
                        "--input", str(tmp_path / "missing.evs1"),
                        "--output", str(tmp_path / "o")],
                       capture_output=True, text=True)
    assert r.returncode == 2
