"""Run history storage for qwpinpaint."""

from .manager import RunDatabase

__all__ = ['RunDatabase']
