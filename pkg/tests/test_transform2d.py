"""Tests for the 2D qWP transform and directional waveforms."""

import numpy as np
import pytest

from qwpinpaint.errors import TransformError
from qwpinpaint.quality.metrics import psnr
from qwpinpaint.transform.spline_filters import build_filter_bank
from qwpinpaint.transform.transform1d import qwp_forward_1d, waveform_1d
from qwpinpaint.transform.transform2d import (
    direction_classes,
    directional_waveform_2d,
    partial_reconstruction,
    qwp_forward_2d,
    qwp_inverse_2d,
    spectral_tiling,
)


@pytest.fixture(scope="module")
def bank64():
    """Filter bank for 64x64 images."""
    return build_filter_bank(5, 64, 3)


@pytest.fixture(scope="module")
def bank128():
    """Filter bank for 128x128 images."""
    return build_filter_bank(5, 128, 4)


@pytest.fixture
def noise():
    """Random 128x128 image."""
    return np.random.default_rng(11).uniform(0, 255, size=(128, 128))


def smooth_image(N):
    """Synthetic natural-looking test image with edges and smooth shading."""
    k, n = np.mgrid[0:N, 0:N] / N
    image = 120 + 60 * np.sin(2 * np.pi * k) * np.cos(3 * np.pi * n)
    image[(k - 0.5) ** 2 + (n - 0.4) ** 2 < 0.05] += 50
    image[:, int(0.7 * N):] -= 40
    return image


def quadrant_masks(N):
    """Boolean masks of the two quadrant pairs, axis bins shared by both."""
    n = np.arange(N)
    pos = n <= N // 2
    neg = (n == 0) | (n >= N // 2)
    same = np.outer(pos, pos) | np.outer(neg, neg)
    opposite = np.outer(pos, neg) | np.outer(neg, pos)
    return same, opposite


def test_block_counts(bank64):
    """Test 8 blocks at level 1 and 32 at level 2."""
    tree = qwp_forward_2d(np.ones((64, 64)), bank64, 3)
    assert tree.block_count(1) == 8
    assert tree.block_count(2) == 32
    assert tree.block_count(3) == 128
    assert tree.block(2, 3, 1, -1).shape == (16, 16)


def test_zero_image(bank64):
    """Test that zero maps to zero both ways."""
    tree = qwp_forward_2d(np.zeros((64, 64)), bank64, 2)
    assert np.all(tree.level(2) == 0)
    assert np.all(qwp_inverse_2d(tree, bank64) == 0)


def test_separable_input(bank64):
    """Test that a separable image gives outer products of 1D blocks."""
    rng = np.random.default_rng(2)
    x = rng.normal(size=64)
    y = rng.normal(size=64)
    tree = qwp_forward_2d(np.outer(x, y), bank64, 2)
    for m in (1, 2):
        tx = qwp_forward_1d(x, bank64, m).level(m)
        ty = qwp_forward_1d(y, bank64, m).level(m)
        for j in range(2 ** m):
            for l in range(2 ** m):
                assert np.allclose(tree.block(m, j, l, +1), np.outer(tx[0, j], ty[0, l]))
                assert np.allclose(tree.block(m, j, l, -1), np.outer(tx[0, j], ty[1, l]))


def test_energy(bank64):
    """Test that both trees together carry eight times the image energy."""
    image = np.random.default_rng(5).normal(size=(64, 64))
    tree = qwp_forward_2d(image, bank64, 3)
    for m in (1, 2, 3):
        energy = np.sum(np.abs(tree.level(m)) ** 2)
        assert energy == pytest.approx(8 * np.sum(image ** 2), rel=1e-9)


def test_round_trip_noise(bank128, noise):
    """Test reconstruction of a random image from depth 3."""
    tree = qwp_forward_2d(noise, bank128, 3)
    error = np.max(np.abs(qwp_inverse_2d(tree, bank128) - noise))
    assert error < 1e-9 * 255


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_round_trip_every_depth(bank128, M):
    """Test perfect reconstruction at every supported depth."""
    image = smooth_image(128)
    tree = qwp_forward_2d(image, bank128, M)
    for m in range(1, M + 1):
        assert np.allclose(qwp_inverse_2d(tree, bank128, level=m), image, atol=1e-9)


@pytest.mark.parametrize("p", [3, 5, 9])
def test_round_trip_psnr(p):
    """Test the 256x256 round trip PSNR from every depth up to 4."""
    bank = build_filter_bank(p, 256, 4)
    image = smooth_image(256)
    tree = qwp_forward_2d(image, bank, 4)
    for m in range(1, 5):
        assert psnr(image, qwp_inverse_2d(tree, bank, level=m)) > 250


def test_linearity(bank64):
    """Test linearity of the forward transform."""
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=(2, 64, 64))
    combined = qwp_forward_2d(a - 2 * b, bank64, 2).level(2)
    separate = qwp_forward_2d(a, bank64, 2).level(2) - 2 * qwp_forward_2d(b, bank64, 2).level(2)
    assert np.allclose(combined, separate)


def test_errors(bank64):
    """Test size, depth and completeness validation."""
    with pytest.raises(TransformError):
        qwp_forward_2d(np.zeros((64, 32)), bank64, 1)
    with pytest.raises(TransformError):
        qwp_forward_2d(np.zeros((64, 64)), bank64, 4)
    tree = qwp_forward_2d(np.zeros((64, 64)), bank64, 2)
    tree.levels[2] = tree.levels[2][:1]
    with pytest.raises(TransformError):
        qwp_inverse_2d(tree, bank64)


def test_partial_reconstruction(bank64):
    """Test that both partial images average to the full reconstruction."""
    image = smooth_image(64)
    tree = qwp_forward_2d(image, bank64, 2)
    plus = partial_reconstruction(tree, bank64, +1)
    minus = partial_reconstruction(tree, bank64, -1)
    assert np.allclose((plus + minus).real / 8, qwp_inverse_2d(tree, bank64))

    zero = qwp_forward_2d(np.zeros((64, 64)), bank64, 2)
    assert np.all(partial_reconstruction(zero, bank64, +1) == 0)


def test_orientation_selectivity(bank64):
    """Test that an anti-diagonal line is captured by the + tree."""
    image = np.zeros((64, 64))
    k = np.arange(64)
    image[k, 63 - k] = 255.0
    tree = qwp_forward_2d(image, bank64, 2)
    plus = partial_reconstruction(tree, bank64, +1).real
    minus = partial_reconstruction(tree, bank64, -1).real
    assert np.sum(plus[k, 63 - k] ** 2) > np.sum(minus[k, 63 - k] ** 2)


def test_directional_waveform_quadrants(bank64):
    """Test spectral confinement of every level-2 waveform."""
    same, opposite = quadrant_masks(64)
    for j in range(4):
        for l in range(4):
            for sign, region in ((+1, same), (-1, opposite)):
                theta = directional_waveform_2d(bank64, 2, j, l, sign).values
                energy = np.abs(np.fft.fft2(theta)) ** 2
                assert energy[~region].sum() / energy.sum() < 1e-8


def test_directional_waveform_tensor_identity(bank64):
    """Test theta against tensor products of 1D packets."""
    for j, l in ((0, 1), (1, 2), (3, 3)):
        psi_j, psi_l = (waveform_1d(bank64, 2, i, "psi") for i in (j, l))
        phi_j, phi_l = (waveform_1d(bank64, 2, i, "phi") for i in (j, l))
        for sign in (+1, -1):
            expected = np.outer(psi_j, psi_l) - sign * np.outer(phi_j, phi_l)
            expected /= np.linalg.norm(expected)
            theta = directional_waveform_2d(bank64, 2, j, l, sign)
            assert theta.sign == sign
            assert np.allclose(theta.values, expected, atol=1e-10)


def test_directional_waveform_symmetric_spectrum(bank64):
    """Test point symmetry of the magnitude spectrum."""
    theta = directional_waveform_2d(bank64, 3, 2, 5, -1).values
    spectrum = np.abs(np.fft.fft2(theta))
    flipped = np.roll(spectrum[::-1, ::-1], 1, axis=(0, 1))
    assert np.allclose(spectrum, flipped)


def test_directional_waveform_invalid(bank64):
    """Test invalid block indices."""
    with pytest.raises(TransformError):
        directional_waveform_2d(bank64, 2, 4, 0, +1)


def test_direction_classes_small(bank64):
    """Test class assignment at level 2."""
    classes = direction_classes(bank64, 2)
    assert len(classes) == 32
    assert len(set(classes.values())) == 2 * (2 ** 3 - 1)
    for (sign, j, l), value in classes.items():
        assert value == (sign, l - j)


def test_direction_classes_62():
    """Test the direction count of the level-4 waveform set on N=256."""
    classes = direction_classes(build_filter_bank(5, 256, 4), 4)
    assert len(set(classes.values())) == 62


@pytest.mark.parametrize("m", [1, 2, 3])
def test_spectral_tiling(bank64, m):
    """Test that the 2D packet spectra tile the frequency plane."""
    assert np.allclose(spectral_tiling(bank64, m), 16 * 4 ** m, rtol=1e-9)
