"""End-to-end augmentation pipeline behavior."""

import numpy as np
from pytest import raises

from shapeaug.errors import ConfigError
from shapeaug.events import EventHistogram
from shapeaug.motion import PathSpec
from shapeaug.pipeline import (
    AugConfig,
    GeoParams,
    augment,
    augment_batch,
    augment_detail,
    augment_geometric,
    derive_rng,
)
from shapeaug.render import render_sequence
from shapeaug.shapes import SceneSpec
from shapeaug.simulate import NoiseParams, occlusion_mask, simulate_shape_events


def random_hist(rng, T=10, H=48, W=40):
    return EventHistogram(
        rng.integers(0, 6, size=(T, 2, H, W)).astype(np.float32))


def test_config_validation():
    with raises(ConfigError):
        AugConfig(mode="bogus")
    with raises(ConfigError):
        AugConfig(max_shapes=0)
    with raises(ConfigError):
        AugConfig(s_min=0.0)
    with raises(ConfigError):
        AugConfig(s_min=9.0, s_max=3.0)
    with raises(ConfigError):
        AugConfig(timesteps=0)
    with raises(ConfigError):
        AugConfig(seed=-1)
    with raises(ConfigError):
        AugConfig(seed=2**64)


def test_geo_params_validation():
    with raises(ConfigError):
        GeoParams(pad=-1)
    with raises(ConfigError):
        GeoParams(crop_h=0)
    with raises(ConfigError):
        GeoParams(p_hflip=1.5)
    with raises(ConfigError):
        GeoParams(max_rotate_deg=-5.0)


def test_derive_rng_streams():
    a = derive_rng(7, 0).uniform(size=4)
    b = derive_rng(7, 0).uniform(size=4)
    c = derive_rng(7, 1).uniform(size=4)
    d = derive_rng(8, 0).uniform(size=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_mode_none_is_identity_copy():
    hist = random_hist(np.random.default_rng(0))
    out = augment(hist, AugConfig(mode="none"), 0)
    assert np.array_equal(out.data, hist.data)
    out.data[0, 0, 0, 0] += 1.0
    assert out.data[0, 0, 0, 0] != hist.data[0, 0, 0, 0]


def test_timestep_mismatch_is_rejected():
    hist = random_hist(np.random.default_rng(0), T=5)
    with raises(ConfigError):
        augment(hist, AugConfig(timesteps=10), 0)


def test_augment_is_deterministic_per_index():
    hist = random_hist(np.random.default_rng(1))
    cfg = AugConfig(seed=99)
    a = augment(hist, cfg, 3)
    b = augment(hist, cfg, 3)
    c = augment(hist, cfg, 4)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, c.data)


def test_detail_intermediates_are_consistent():
    hist = random_hist(np.random.default_rng(2))
    for union in (False, True):
        cfg = AugConfig(seed=5, mask_union=union)
        res = augment_detail(hist, cfg, 0)
        assert res.scene is not None and res.paths is not None
        assert len(res.paths) == res.scene.n_shapes
        assert res.sequence.intensity.shape == (11, 48, 40)
        assert res.simulated.data.shape == (10, 2, 48, 40)
        want = occlusion_mask(hist, res.sequence, union=union)
        assert np.array_equal(res.output.data,
                              want.data + res.simulated.data)


def test_masked_cells_match_simulated_exactly():
    hist = random_hist(np.random.default_rng(3))
    cfg = AugConfig(seed=11, noise=NoiseParams(enabled=False))
    res = augment_detail(hist, cfg, 2)
    covered = res.sequence.mask[1:][:, None, :, :] & np.ones(
        (1, 2, 1, 1), dtype=bool)
    diff = res.output.data - res.simulated.data
    assert covered.any()
    assert not diff[covered].any()
    # Uncovered cells keep the real events.
    assert np.array_equal(diff[~covered], hist.data[~covered])


def test_legacy_paths_are_straight():
    hist = random_hist(np.random.default_rng(4))
    cfg = AugConfig(mode="shapeaug_legacy", seed=13)
    res = augment_detail(hist, cfg, 0)
    for path in res.paths:
        assert path.gamma == 0.0
        deltas = np.diff(path.samples, axis=0)
        assert np.allclose(deltas, deltas[0], atol=1e-9, rtol=0)
        # Every sample sits on the p0 -> p2 segment.
        d = path.p2 - path.p0
        rel = path.samples - path.p0
        crossing = rel[:, 0] * d[1] - rel[:, 1] * d[0]
        assert np.all(np.abs(crossing) <= 1e-9 * (np.abs(d).max() + 1) ** 2)


def test_mode_none_with_inert_geo_is_identity():
    hist = random_hist(np.random.default_rng(5))
    gp = GeoParams(pad=0, crop_h=48, crop_w=40, p_hflip=0.0,
                   max_rotate_deg=0.0)
    out = augment(hist, AugConfig(mode="none", geo=gp), 0)
    assert np.array_equal(out.data, hist.data)


def test_geometric_flip():
    hist = random_hist(np.random.default_rng(6))
    gp = GeoParams(pad=0, crop_h=48, crop_w=40, p_hflip=1.0,
                   max_rotate_deg=0.0)
    out = augment_geometric(hist, gp, derive_rng(0, 0))
    assert np.array_equal(out.data, hist.data[:, :, :, ::-1])


def test_geometric_pad_crop_replication():
    hist = random_hist(np.random.default_rng(7), T=3, H=20, W=16)
    gp = GeoParams(pad=3, crop_h=20, crop_w=16, p_hflip=0.0,
                   max_rotate_deg=0.0)
    out = augment_geometric(hist, gp, derive_rng(21, 4))
    rng = derive_rng(21, 4)
    oy = int(rng.integers(0, 7))
    ox = int(rng.integers(0, 7))
    padded = np.pad(hist.data, ((0, 0), (0, 0), (3, 3), (3, 3)))
    assert np.array_equal(out.data, padded[:, :, oy:oy + 20, ox:ox + 16])


def test_geometric_crop_larger_than_padded_rejected():
    hist = random_hist(np.random.default_rng(8), T=2, H=10, W=10)
    gp = GeoParams(pad=1, crop_h=13, crop_w=10)
    with raises(ConfigError):
        augment_geometric(hist, gp, derive_rng(0, 0))


def test_geometric_quarter_turn_moves_impulse():
    data = np.zeros((1, 2, 4, 4), dtype=np.float32)
    data[0, :, 1, 2] = 1.0  # offset (+0.5, -0.5) from the center
    gp = GeoParams(pad=0, crop_h=4, crop_w=4, p_hflip=0.0,
                   max_rotate_deg=90.0)

    class _FixedAngle:
        def __init__(self, inner):
            self._inner = inner

        def integers(self, *a, **k):
            return self._inner.integers(*a, **k)

        def uniform(self, lo=0.0, hi=1.0, *a, **k):
            if lo == -90.0:
                return 90.0
            return self._inner.uniform(lo, hi, *a, **k)

    out = augment_geometric(EventHistogram(data), gp,
                            _FixedAngle(np.random.default_rng(0)))
    want = np.zeros_like(data)
    want[0, :, 2, 2] = 1.0  # rotated to offset (+0.5, +0.5)
    assert np.allclose(out.data, want, atol=1e-6, rtol=0)


def test_geo_stage_changes_working_resolution():
    hist = random_hist(np.random.default_rng(9), T=6, H=60, W=60)
    gp = GeoParams(pad=2, crop_h=40, crop_w=32)
    cfg = AugConfig(timesteps=6, geo=gp, seed=3)
    res = augment_detail(hist, cfg, 0)
    assert res.output.data.shape == (6, 2, 40, 32)
    assert res.sequence.intensity.shape == (7, 40, 32)


def test_batch_matches_individual_calls_and_threads():
    rng = np.random.default_rng(10)
    hists = [random_hist(rng, T=4, H=24, W=24) for _ in range(6)]
    cfg = AugConfig(timesteps=4, seed=77)
    single = [augment(h, cfg, 5 + i) for i, h in enumerate(hists)]
    batch1 = augment_batch(hists, cfg, base_index=5, threads=1)
    batch4 = augment_batch(hists, cfg, base_index=5, threads=4)
    for a, b, c in zip(single, batch1, batch4):
        assert np.array_equal(a.data, b.data)
        assert np.array_equal(a.data, c.data)


def test_batch_error_names_failing_sample():
    rng = np.random.default_rng(11)
    hists = [random_hist(rng, T=4, H=16, W=16),
             random_hist(rng, T=3, H=16, W=16)]
    cfg = AugConfig(timesteps=4, seed=0)
    with raises(ConfigError, match=r"^sample 8:"):
        augment_batch(hists, cfg, base_index=7)


def test_static_scene_emits_no_events():
    # A path that never moves nor rotates renders identical frames, so
    # differencing yields nothing for the noise stage to amplify.
    rng = derive_rng(31, 0)
    from shapeaug.shapes import sample_scene

    cfg = AugConfig(seed=31, timesteps=8)
    scene = sample_scene(rng, cfg, 40, 40)
    paths = []
    for shape in scene.shapes:
        center = np.asarray(shape.center, dtype=np.float64)
        samples = np.tile(center, (9, 1))
        paths.append(PathSpec(center, center.copy(), center.copy(), 0.0,
                              samples))
    seq = render_sequence(scene, paths, 8, 40, 40)
    out = simulate_shape_events(seq, rng, NoiseParams())
    assert not out.data.any()
