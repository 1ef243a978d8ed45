"""Tests for image extension, fusion, the data step and the M1/M2 iterations."""

import numpy as np
import pytest

from qwpinpaint.errors import ConfigError, InpaintError
from qwpinpaint.imageio.degrade import degrade
from qwpinpaint.quality.metrics import psnr, ssim
from qwpinpaint.restore.inpaint import (
    INPAINT_METHODS,
    BregmanState,
    InpaintConfig,
    MaskedImage,
    crop,
    extend_symmetric,
    fuse_levels,
    m1_inpaint,
    m2_inpaint,
    padded_size,
    solve_data_step,
)
from qwpinpaint.transform.spline_filters import build_filter_bank


def texture(N):
    """Smooth shading, a disc and a vertical edge."""
    k, n = np.mgrid[0:N, 0:N] / N
    image = 110 + 50 * np.sin(2 * np.pi * k) * np.cos(2 * np.pi * n)
    image[(k - 0.5) ** 2 + (n - 0.5) ** 2 < 0.06] += 45
    image[:, int(0.75 * N):] -= 35
    return np.clip(image, 0, 255)


@pytest.fixture
def fast_config():
    """Shallow levels and short schedules so a run takes a fraction of a second."""
    return InpaintConfig(levels=(1, 2), R1=2, R2=2, L1=2, L2=2, L3=2)


@pytest.fixture
def shallow_config():
    """Default schedule on shallow levels, enough iterations to fill the holes."""
    return InpaintConfig(levels=(1, 2))


@pytest.fixture
def half_missing():
    clean = texture(32)
    degraded, mask = degrade(clean, rho_missing=0.5, sigma=0.0, seed=3)
    return clean, MaskedImage(degraded, mask)


def test_masked_image_validation():
    """Test shape, mask values and sigma are checked."""
    with pytest.raises(InpaintError):
        MaskedImage(np.zeros((4, 4)), np.ones((4, 5)))
    with pytest.raises(InpaintError):
        MaskedImage(np.zeros((4, 4)), np.full((4, 4), 0.5))
    with pytest.raises(InpaintError):
        MaskedImage(np.zeros((4, 4)), np.ones((4, 4)), sigma=-1)
    with pytest.raises(InpaintError):
        MaskedImage(np.zeros(4), np.ones(4))


def test_config_defaults():
    """Test per-level windows and weights default from the levels."""
    cfg = InpaintConfig()
    assert cfg.levels == (3, 4)
    assert cfg.windows == (3, 2)
    assert cfg.weights == (1.0, 1.0)
    assert cfg.parent_level == 5
    assert InpaintConfig(levels=(2, 3, 4)).windows == (3, 3, 2)


@pytest.mark.parametrize("kwargs", [
    {'levels': ()},
    {'levels': (3, 3)},
    {'levels': (0, 1)},
    {'weights': (1.0,)},
    {'weights': (1.0, -1.0)},
    {'windows': (0, 2)},
    {'p': 1},
    {'p': 10},
    {'mu': 0.0},
    {'R1': 1},
    {'margin': -1},
    {'L2': -1},
])
def test_config_rejects(kwargs):
    """Test invalid parameters raise ConfigError."""
    with pytest.raises(ConfigError):
        InpaintConfig(**kwargs)


def test_extend_symmetric_layout():
    """Test the image sits centered in a mirrored dyadic square."""
    image = np.arange(120, dtype=float).reshape(10, 12)
    ext = extend_symmetric(MaskedImage(image, np.ones_like(image)), 2)
    assert ext.size == 16
    assert (ext.top, ext.left) == (3, 2)
    np.testing.assert_array_equal(crop(ext.Y, ext), image)
    np.testing.assert_array_equal(ext.Y[ext.top - 1, ext.left:ext.left + 12], image[0])
    np.testing.assert_array_equal(ext.Y[ext.top:ext.top + 10, ext.left - 1], image[:, 0])
    assert ext.theta.shape == (16, 16)


def test_extend_symmetric_mirrors_mask():
    """Test the mask is extended the same way as the image."""
    rng = np.random.default_rng(0)
    mask = (rng.uniform(size=(8, 8)) > 0.5).astype(float)
    ext = extend_symmetric(MaskedImage(mask * 7, mask), 4)
    np.testing.assert_array_equal(ext.Y, 7 * ext.theta)


def test_extend_symmetric_min_size():
    """Test tiny images are padded up to the minimum size."""
    ext = extend_symmetric(MaskedImage(np.ones((4, 4)), np.ones((4, 4))), 0, min_size=64)
    assert ext.size == 64


def test_extend_symmetric_rejects_negative_margin():
    with pytest.raises(InpaintError):
        extend_symmetric(MaskedImage(np.ones((4, 4)), np.ones((4, 4))), -1)


def test_padded_size():
    """Test margin N/8 and the minimum size of the parent level."""
    assert padded_size(100, 100, InpaintConfig()) == 256
    assert padded_size(300, 200, InpaintConfig()) == 512
    assert padded_size(32, 32, InpaintConfig(levels=(1, 2))) == 64
    assert padded_size(60, 60, InpaintConfig(levels=(1, 2), margin=0)) == 64


def test_fuse_levels_weighted_mean():
    """Test beta=(1, 3) on images 0 and 4 gives 3."""
    fused = fuse_levels([np.zeros((4, 4)), np.full((4, 4), 4.0)], [1.0, 3.0])
    np.testing.assert_allclose(fused, 3.0)


def test_fuse_levels_single():
    image = np.random.default_rng(1).normal(size=(8, 8))
    np.testing.assert_allclose(fuse_levels([image], [2.5]), image)


def test_fuse_levels_errors():
    """Test empty, mismatched and non-positive weights raise."""
    with pytest.raises(InpaintError):
        fuse_levels([], [])
    with pytest.raises(InpaintError):
        fuse_levels([np.zeros(2)], [1.0, 1.0])
    with pytest.raises(InpaintError):
        fuse_levels([np.zeros(2), np.zeros(2)], [1.0, 0.0])


def test_solve_data_step_closed_form():
    """Test observed pixels mix data and iterate, missing ones keep the iterate."""
    Y = np.full((4, 4), 10.0)
    theta = np.zeros((4, 4))
    theta[:2] = 1
    xprev = np.full((4, 4), 4.0)
    X = solve_data_step(Y, theta, 0.5, xprev)
    np.testing.assert_allclose(X[:2], (10 + 0.5 * 4) / 1.5)
    np.testing.assert_allclose(X[2:], 4.0)


def test_solve_data_step_cg_matches_closed_form():
    """Test the conjugate-gradient path on random instances."""
    rng = np.random.default_rng(12)
    for _ in range(100):
        Y = rng.uniform(0, 255, (8, 8))
        theta = (rng.uniform(size=(8, 8)) > 0.4).astype(float)
        xprev = rng.uniform(0, 255, (8, 8))
        mu = float(rng.uniform(0.01, 2))
        direct = solve_data_step(Y, theta, mu, xprev)
        iterative = solve_data_step(Y, theta, mu, xprev, use_cg=True)
        np.testing.assert_allclose(iterative, direct, rtol=1e-10, atol=1e-10)


def test_solve_data_step_rejects_mu():
    with pytest.raises(InpaintError):
        solve_data_step(np.ones(2), np.ones(2), 0.0, np.ones(2))


def test_bregman_state_zeros():
    """Test auxiliary arrays have the level block layout."""
    state = BregmanState.zeros(64, (1, 2))
    assert state.d[1].shape == (2, 2, 2, 32, 32)
    assert state.b[2].shape == (2, 4, 4, 16, 16)
    assert not np.any(state.d[2])


@pytest.mark.parametrize("method", ["m1", "m2"])
def test_inpaint_improves_psnr(method, shallow_config, half_missing):
    """Test both methods beat the degraded input on a half-missing image."""
    clean, mi = half_missing
    restored = INPAINT_METHODS[method](mi, shallow_config)
    assert restored.shape == clean.shape
    assert np.all(np.isfinite(restored))
    assert psnr(clean, restored) > psnr(clean, mi.degraded) + 3


@pytest.mark.parametrize("method", [m1_inpaint, m2_inpaint])
def test_inpaint_reports_iterations(method, fast_config, half_missing):
    """Test the callback sees consecutive iterations and cropped iterates."""
    clean, mi = half_missing
    records = []
    shapes = set()

    def on_iteration(record, X):
        records.append(record)
        shapes.add(X.shape)

    method(mi, fast_config, on_iteration=on_iteration)
    assert [r.k for r in records] == list(range(1, len(records) + 1))
    assert shapes == {clean.shape}
    # R1=R2=2, L's=2: at most (R1-1)(L1+2) + R2(L2+2) + L3+1 iterations
    assert 0 < len(records) <= 15
    assert records[0].nu == 1
    assert all(b.nu >= a.nu for a, b in zip(records, records[1:]))


def test_inpaint_is_deterministic(fast_config, half_missing):
    """Test repeated runs are bit-identical."""
    _, mi = half_missing
    first = m2_inpaint(mi, fast_config)
    second = m2_inpaint(mi, fast_config)
    np.testing.assert_array_equal(first, second)


def test_m2_full_mask_keeps_image(shallow_config):
    """Test with every pixel present and no noise, M2 stays close to the input."""
    clean = texture(32)
    restored = m2_inpaint(MaskedImage(clean, np.ones_like(clean)), shallow_config)
    assert psnr(clean, restored) > 30


def test_m2_with_cg(fast_config, half_missing):
    """Test the CG data step gives the same result as the direct solve."""
    _, mi = half_missing
    direct = m2_inpaint(mi, fast_config)
    cfg = InpaintConfig(levels=(1, 2), R1=2, R2=2, L1=2, L2=2, L3=2, use_cg=True)
    np.testing.assert_allclose(m2_inpaint(mi, cfg), direct, atol=1e-6)


def test_inpaint_accepts_prebuilt_bank(fast_config, half_missing):
    """Test a matching filter bank is used and a mismatched one rejected."""
    _, mi = half_missing
    fb = build_filter_bank(fast_config.p, 64, fast_config.parent_level)
    np.testing.assert_array_equal(m1_inpaint(mi, fast_config, fb=fb), m1_inpaint(mi, fast_config))
    with pytest.raises(InpaintError):
        m1_inpaint(mi, fast_config, fb=build_filter_bank(5, 128, 3))


def test_m2_first_iterate_is_scaled_data(fast_config, half_missing):
    """Test with zero auxiliary arrays the first iterate is Y / (theta + mu)."""
    _, mi = half_missing
    iterates = []
    m2_inpaint(mi, fast_config, on_iteration=lambda record, X: iterates.append(X.copy()))
    np.testing.assert_allclose(iterates[0], mi.degraded / (mi.mask + fast_config.mu), atol=1e-12)


@pytest.mark.parametrize("method", ["m1", "m2"])
def test_inpaint_without_data_stays_zero(method, fast_config):
    """Test an all-zero image with an empty mask is a fixed point."""
    empty = MaskedImage(np.zeros((32, 32)), np.zeros((32, 32)))
    restored = INPAINT_METHODS[method](empty, fast_config)
    assert restored.shape == (32, 32)
    assert not np.any(restored)


def oriented_grid(N):
    """Sinusoids at several orientations and frequencies."""
    k, n = np.mgrid[0:N, 0:N] / N
    return (128 + 40 * np.sin(2 * np.pi * (6 * k + 3 * n))
            + 30 * np.cos(2 * np.pi * (2 * k - 7 * n))
            + 20 * np.sin(2 * np.pi * 10 * k))


def smooth_image(N):
    k, n = np.mgrid[0:N, 0:N] / N
    return 110 + 50 * np.sin(2 * np.pi * k) * np.cos(2 * np.pi * n)


@pytest.fixture(scope="module")
def default_bank():
    """Filter bank for 128x128 inputs under the default levels (3, 4) and parent 5."""
    cfg = InpaintConfig()
    return build_filter_bank(cfg.p, padded_size(128, 128, cfg), cfg.parent_level)


@pytest.fixture(scope="module")
def natural_image():
    """The scipy ``ascent`` photograph, block-averaged down to 128x128."""
    datasets = pytest.importorskip("scipy.datasets")
    pytest.importorskip("pooch")
    try:
        ascent = datasets.ascent()
    except Exception as e:
        pytest.skip(f"sample image unavailable: {e}")
    return ascent.astype(float).reshape(128, 4, 128, 4).mean(axis=(1, 3))


@pytest.fixture(scope="module", params=["texture", "natural"])
def clean_image(request):
    if request.param == "texture":
        return oriented_grid(128)
    return request.getfixturevalue("natural_image")


@pytest.fixture(scope="module")
def restorations():
    """Results shared by the end-to-end tests, keyed by image and degradation."""
    return {}


def restore_both(restorations, clean, rho, sigma, fb):
    key = (clean.tobytes(), rho, sigma)
    if key not in restorations:
        degraded, mask = degrade(clean, rho_missing=rho, sigma=sigma, seed=7)
        mi = MaskedImage(degraded, mask, sigma)
        result = {'degraded': degraded}
        for method in ("m1", "m2"):
            records = []
            result[method] = INPAINT_METHODS[method](
                mi, InpaintConfig(), fb=fb, on_iteration=lambda record, X: records.append(record))
            result[method + '_iterations'] = len(records)
        restorations[key] = result
    return restorations[key]


@pytest.mark.slow
@pytest.mark.parametrize("method", ["m1", "m2"])
def test_full_mask_noise_free_is_near_identity(method, default_bank):
    """Test with every pixel present and no noise the output is within 40 dB of the input."""
    clean = oriented_grid(128)
    restored = INPAINT_METHODS[method](MaskedImage(clean, np.ones_like(clean)), InpaintConfig(),
                                       fb=default_bank)
    assert psnr(clean, restored) >= 40


@pytest.mark.slow
def test_m1_fills_half_missing_smooth_image(default_bank):
    """Test M1 gains at least 10 dB over a half-missing smooth image."""
    clean = smooth_image(128)
    degraded, mask = degrade(clean, rho_missing=0.5, sigma=0.0, seed=7)
    restored = m1_inpaint(MaskedImage(degraded, mask), InpaintConfig(), fb=default_bank)
    assert psnr(clean, restored) >= psnr(clean, degraded) + 10


@pytest.mark.slow
@pytest.mark.parametrize("rho", [0.5, 0.8])
@pytest.mark.parametrize("sigma", [0.0, 10.0, 50.0])
def test_end_to_end_improves_and_terminates(clean_image, rho, sigma, restorations, default_bank):
    """Test both methods beat the degraded input within the iteration budget."""
    result = restore_both(restorations, clean_image, rho, sigma, default_bank)
    baseline = psnr(clean_image, result['degraded'])
    cfg = InpaintConfig()
    bound = (cfg.R1 - 1) * (cfg.L1 + 2) + cfg.R2 * (cfg.L2 + 2) + cfg.L3 + 1
    for method in ("m1", "m2"):
        assert psnr(clean_image, result[method]) > baseline
        assert 0 < result[method + '_iterations'] <= bound


@pytest.mark.slow
@pytest.mark.parametrize("rho", [0.5, 0.8])
@pytest.mark.parametrize("sigma", [0.0, 10.0, 50.0])
def test_m2_not_worse_than_m1(clean_image, rho, sigma, restorations, default_bank):
    """Test Split Bregman keeps up with plain shrinkage in SSIM."""
    result = restore_both(restorations, clean_image, rho, sigma, default_bank)
    assert ssim(clean_image, result['m2']) >= ssim(clean_image, result['m1']) - 0.01


@pytest.mark.slow
def test_m2_matches_m1_on_noisy_texture(restorations, default_bank):
    """Test on a half-missing texture with sigma=10 M2 loses at most 0.3 dB to M1."""
    clean = oriented_grid(128)
    result = restore_both(restorations, clean, 0.5, 10.0, default_bank)
    assert psnr(clean, result['m2']) >= psnr(clean, result['m1']) - 0.3
    assert ssim(clean, result['m2']) >= ssim(clean, result['m1']) - 0.01
