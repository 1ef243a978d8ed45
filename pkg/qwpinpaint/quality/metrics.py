"""PSNR and SSIM for 8-bit grayscale images."""

import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
from scipy import ndimage

PEAK = 255.0
SSIM_SIGMA = 1.5
SSIM_RADIUS = 5
K1 = 0.01
K2 = 0.03


def _pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"Image shapes differ: {x.shape} vs {y.shape}")
    return x, y


def psnr(x, y) -> float:
    """Peak signal-to-noise ratio in dB, ``inf`` for identical images.

    Raises:
        ValueError: If the shapes differ
    """
    x, y = _pair(x, y)
    error = float(np.sum((x - y) ** 2))
    if error == 0.0:
        return math.inf
    return 10.0 * math.log10(x.size * PEAK ** 2 / error)


def _local_mean(image: np.ndarray) -> np.ndarray:
    return ndimage.gaussian_filter(image, SSIM_SIGMA, truncate=SSIM_RADIUS / SSIM_SIGMA)


def ssim(x, y) -> float:
    """Mean structural similarity over every full 11x11 Gaussian window.

    Raises:
        ValueError: If the shapes differ or the images are smaller than 11x11
    """
    x, y = _pair(x, y)
    side = 2 * SSIM_RADIUS + 1
    if x.ndim != 2 or min(x.shape) < side:
        raise ValueError(f"SSIM needs 2D images of at least {side}x{side}, got {x.shape}")

    c1 = (K1 * PEAK) ** 2
    c2 = (K2 * PEAK) ** 2
    mu_x = _local_mean(x)
    mu_y = _local_mean(y)
    var_x = _local_mean(x * x) - mu_x * mu_x
    var_y = _local_mean(y * y) - mu_y * mu_y
    cov = _local_mean(x * y) - mu_x * mu_y

    index = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / \
        ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2))
    valid = index[SSIM_RADIUS:-SSIM_RADIUS, SSIM_RADIUS:-SSIM_RADIUS]
    return float(valid.mean())


@dataclass(frozen=True)
class QualityReport:
    """PSNR/SSIM pair of a restored image against its reference."""
    psnr: float
    ssim: float

    @classmethod
    def measure(cls, reference, restored) -> "QualityReport":
        return cls(psnr=psnr(reference, restored), ssim=ssim(reference, restored))

    def line(self) -> str:
        return f"psnr={round(self.psnr, 4)} ssim={round(self.ssim, 6)}"

    def to_dict(self) -> Dict[str, Any]:
        value = "inf" if math.isinf(self.psnr) else round(self.psnr, 4)
        return {'psnr': value, 'ssim': round(self.ssim, 6)}

    def __str__(self) -> str:
        return self.line()
