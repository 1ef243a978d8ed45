"""Spline quasi-analytic wavelet packets and image inpainting."""

from .core import InpaintResult, InpaintRunner
from .cli import qwp as cli

__all__ = ["InpaintRunner", "InpaintResult", "cli"]
