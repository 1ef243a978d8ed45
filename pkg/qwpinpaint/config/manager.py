"""Configuration management for qwpinpaint."""

import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from ..errors import ConfigError, MissingFileError
from ..restore.inpaint import InpaintConfig
from .defaults import DEFAULT_CONFIG, METHODS, OPTIONAL_KEYS, PATH_KEYS

INT_KEYS = ('p', 'margin', 'R1', 'R2', 'L1', 'L2', 'L3', 'seed', 'checkpoint_every')
FLOAT_KEYS = ('mu', 'tol1', 'tol2', 'sigma', 'rho_missing')
BOOL_KEYS = ('normalize_delta', 'use_cg')
INT_LIST_KEYS = ('levels', 'windows')
FLOAT_LIST_KEYS = ('weights',)
STR_KEYS = ('method',) + PATH_KEYS

INPAINT_KEYS = ('p', 'levels', 'weights', 'windows', 'margin', 'mu', 'R1', 'R2', 'tol1', 'tol2',
                'L1', 'L2', 'L3', 'normalize_delta', 'use_cg')

KNOWN_KEYS = frozenset(DEFAULT_CONFIG) | frozenset(OPTIONAL_KEYS)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_type(key: str, value: Any):
    if key in INT_KEYS:
        ok = _is_int(value)
    elif key in FLOAT_KEYS:
        ok = _is_number(value)
    elif key in BOOL_KEYS:
        ok = isinstance(value, bool)
    elif key in INT_LIST_KEYS:
        ok = isinstance(value, (list, tuple)) and all(_is_int(v) for v in value)
    elif key in FLOAT_LIST_KEYS:
        ok = isinstance(value, (list, tuple)) and all(_is_number(v) for v in value)
    else:
        ok = isinstance(value, (str, Path))
    if not ok:
        raise ConfigError(f"Invalid value for '{key}': {value!r}")


@dataclass
class RunConfig:
    """Everything one ``qwp inpaint`` run needs."""
    inpaint: InpaintConfig = field(default_factory=InpaintConfig)
    method: str = 'm2'
    sigma: float = 0.0
    rho_missing: Optional[float] = None
    seed: int = 0
    mask: Optional[str] = None
    input: Optional[str] = None
    output: Optional[str] = None
    checkpoint_every: int = 0
    checkpoint_dir: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Flat key/value view, the same shape the config file uses."""
        flat = asdict(self.inpaint)
        for key in ('levels', 'weights', 'windows'):
            flat[key] = list(flat[key])
        for key, value in asdict(self).items():
            if key != 'inpaint':
                flat[key] = value
        return flat


class ConfigManager:
    """Loads, merges and validates run configuration.

    Sources are layered: DEFAULT_CONFIG, then a dict or TOML file, then
    explicit overrides (typically command-line flags). Relative paths in a
    config file are resolved against the file's directory.
    """

    def __init__(self, config: Optional[Union[Dict, str, Path]] = None,
                 overrides: Optional[Dict[str, Any]] = None):
        """Initialize the configuration manager.

        Args:
            config: None for defaults, a dict, or the path of a TOML file
            overrides: Values taking precedence over the source; None entries are skipped
        """
        source = self._load_config(config)
        source.update({k: v for k, v in (overrides or {}).items() if v is not None})
        self.explicit = frozenset(source)
        self.config = self._merge_configs(DEFAULT_CONFIG, source)
        self._validate_config()

    def _load_config(self, config: Optional[Union[Dict, str, Path]]) -> Dict:
        if config is None:
            return {}

        if isinstance(config, (str, Path)):
            config_path = Path(config)
            if not config_path.is_file():
                raise MissingFileError(f"Config file not found: {config_path}")
            try:
                with open(config_path, 'rb') as f:
                    loaded = tomllib.load(f)
            except tomllib.TOMLDecodeError as e:
                raise ConfigError(f"Failed to parse config file {config_path}: {e}")
            return self._resolve_paths(loaded, config_path.parent)

        if not isinstance(config, dict):
            raise ConfigError(f"Config must be dict, str, or Path, not {type(config).__name__}")
        return dict(config)

    def _resolve_paths(self, config: Dict, base_path: Path) -> Dict:
        resolved = dict(config)
        for key in PATH_KEYS:
            if isinstance(resolved.get(key), str):
                resolved[key] = str(base_path / resolved[key])
        return resolved

    def _merge_configs(self, base: Dict, override: Dict) -> Dict:
        merged = dict(base)
        merged.update(override)
        # per-level lists follow the levels actually chosen
        if 'levels' in override:
            for key in ('weights', 'windows'):
                if key not in override:
                    merged[key] = None
        return merged

    def _validate_config(self):
        """Check key names, value types and the values InpaintConfig does not cover.

        Raises:
            ConfigError: On an unknown key or an invalid value
        """
        unknown = sorted(set(self.config) - KNOWN_KEYS)
        if unknown:
            raise ConfigError(f"Unknown config key(s): {', '.join(unknown)}")
        for key, value in self.config.items():
            if value is not None:
                _check_type(key, value)

        if self.config['method'] not in METHODS:
            raise ConfigError(f"Unknown method '{self.config['method']}', expected one of {METHODS}")
        if self.config['sigma'] < 0:
            raise ConfigError(f"sigma must be non-negative, got {self.config['sigma']}")
        rho = self.config.get('rho_missing')
        if rho is not None and not 0 <= rho < 1:
            raise ConfigError(f"rho_missing must be in [0, 1), got {rho}")
        if self.config['checkpoint_every'] < 0:
            raise ConfigError("checkpoint_every must be non-negative")
        # surfaces range errors now rather than at run time
        self.get_inpaint_config()

    def get_inpaint_config(self) -> InpaintConfig:
        """Typed inpainting parameters."""
        values = {key: self.config.get(key) for key in INPAINT_KEYS}
        return InpaintConfig(**values)

    def get_run_config(self) -> RunConfig:
        """Typed configuration of a complete run."""
        paths = {key: str(self.config[key]) if self.config.get(key) is not None else None
                 for key in PATH_KEYS}
        return RunConfig(
            inpaint=self.get_inpaint_config(),
            method=self.config['method'],
            sigma=float(self.config['sigma']),
            rho_missing=self.config.get('rho_missing'),
            seed=self.config['seed'],
            checkpoint_every=self.config['checkpoint_every'],
            **paths,
        )


def save_config(run_config: RunConfig, path: Union[str, Path]) -> Path:
    """Write a RunConfig as flat TOML, leaving out unset optional keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {key: value for key, value in run_config.to_dict().items() if value is not None}
    with open(path, 'wb') as f:
        tomli_w.dump(data, f)
    return path
