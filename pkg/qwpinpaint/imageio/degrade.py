"""Synthetic degradation: random pixel masks and additive Gaussian noise."""

import math
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import InpaintError

Shape = Union[int, Tuple[int, int]]


def _shape(shape: Shape) -> Tuple[int, int]:
    if isinstance(shape, (int, np.integer)):
        return int(shape), int(shape)
    return tuple(int(s) for s in shape)


def make_random_mask(shape: Shape, rho_missing: float, seed=None) -> np.ndarray:
    """Mask with exactly ``floor(rho_missing * size)`` missing pixels.

    Args:
        shape: Side length of a square mask or a (height, width) pair
        rho_missing: Fraction of pixels to remove, in [0, 1)
        seed: Seed (or SeedSequence) of the generator placing the holes

    Returns:
        np.ndarray: Float mask, 1 where the pixel is present
    """
    if not 0 <= rho_missing < 1:
        raise InpaintError(f"Missing fraction must be in [0, 1), got {rho_missing}")
    shape = _shape(shape)
    size = shape[0] * shape[1]
    missing = int(math.floor(rho_missing * size))
    mask = np.ones(size)
    mask[np.random.default_rng(seed).permutation(size)[:missing]] = 0.0
    return mask.reshape(shape)


def add_noise(image: np.ndarray, sigma: float, seed=None) -> np.ndarray:
    """Add zero-mean Gaussian noise of standard deviation ``sigma`` everywhere."""
    if sigma < 0:
        raise InpaintError(f"Noise level must be non-negative, got {sigma}")
    image = np.asarray(image, dtype=float)
    if sigma == 0:
        return image.copy()
    return image + np.random.default_rng(seed).normal(0.0, sigma, size=image.shape)


def degrade(clean: np.ndarray, rho_missing: float = 0.0, sigma: float = 0.0, seed: int = 0,
            mask: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Apply the observation model ``mask * (clean + noise)``.

    A random mask is drawn unless one is given. Mask and noise use independent
    streams spawned from ``seed``.

    Returns:
        Tuple of the degraded image and the mask
    """
    clean = np.asarray(clean, dtype=float)
    mask_seed, noise_seed = np.random.SeedSequence(seed).spawn(2)
    if mask is None:
        mask = make_random_mask(clean.shape, rho_missing, mask_seed)
    elif np.shape(mask) != clean.shape:
        raise InpaintError(f"Mask shape {np.shape(mask)} does not match image shape {clean.shape}")
    noisy = add_noise(clean, sigma, noise_seed)
    return mask * noisy, np.asarray(mask, dtype=float)
