"""Configuration management for qwpinpaint."""

from .defaults import DEFAULT_CONFIG
from .manager import ConfigManager, RunConfig, save_config

__all__ = ['ConfigManager', 'RunConfig', 'save_config', 'DEFAULT_CONFIG']
