"""Image quality metrics."""

from .metrics import QualityReport, psnr, ssim

__all__ = ['QualityReport', 'psnr', 'ssim']
