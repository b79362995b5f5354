"""
Runtime configuration.

Values are resolved per key with the precedence

    command-line flags > NTOS_* environment variables > config file > defaults

where the config file is a flat ``key = value`` TOML document.
"""
from __future__ import annotations

import logging
import os
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import PreconditionError
from .order import DEFAULT_WORK_BUDGET

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ('text', 'csv', 'json')
KEYS = ('cache_dir', 'work_budget', 'threads', 'output_format')
_ENV_NAMES = {
    'cache_dir': 'NTOS_CACHE_DIR',
    'work_budget': 'NTOS_WORK_BUDGET',
    'threads': 'NTOS_THREADS',
    'output_format': 'NTOS_FORMAT',
}


def default_cache_dir() -> Path:
    return Path('~/.cache/ntos').expanduser()


def default_config_file(environ: Mapping[str, str] | None = None) -> Path:
    environ = os.environ if environ is None else environ
    if 'NTOS_CONFIG' in environ:
        return Path(environ['NTOS_CONFIG']).expanduser()
    base = environ.get('XDG_CONFIG_HOME') or str(Path('~/.config').expanduser())
    return Path(base) / 'ntos' / 'config.toml'


@dataclass(frozen=True)
class Config:
    """
    Resolved settings shared by every subcommand.

    Attributes:
        cache_dir: Directory holding cached prime tables
        work_budget: Largest accepted x·y (operation pairs)
        threads: Worker count, at least 1
        output_format: One of text, csv, json
    """

    cache_dir: Path
    work_budget: int = DEFAULT_WORK_BUDGET
    threads: int = 1
    output_format: str = 'text'

    def __post_init__(self):
        if self.work_budget <= 0:
            raise PreconditionError(f"work_budget must be positive, got {self.work_budget}")
        if self.threads < 1:
            raise PreconditionError(f"threads must be at least 1, got {self.threads}")
        if self.output_format not in OUTPUT_FORMATS:
            raise PreconditionError(
                f"output_format must be one of {', '.join(OUTPUT_FORMATS)}, got {self.output_format!r}")


def _parse_threads(value: Any) -> int:
    if isinstance(value, str) and value.strip().lower() == 'auto':
        return os.cpu_count() or 1
    try:
        return int(value)
    except (TypeError, ValueError):
        raise PreconditionError(f"threads must be an integer or 'auto', got {value!r}") from None


def _parse_budget(value: Any) -> int:
    try:
        # accepts 2e11 style values
        return int(float(value)) if isinstance(value, (str, float)) else int(value)
    except (TypeError, ValueError):
        raise PreconditionError(f"work_budget must be a positive integer, got {value!r}") from None


def read_config_file(path: str | os.PathLike) -> dict[str, Any]:
    """
    Read a flat TOML config. A missing file yields an empty mapping.

    Raises:
        PreconditionError: If the file is not valid TOML or names an unknown key
    """
    path = Path(path)
    if not path.is_file():
        return {}
    try:
        with open(path, 'rb') as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise PreconditionError(f"Cannot parse config file {path}: {e}") from e
    unknown = sorted(set(data) - set(KEYS))
    if unknown:
        raise PreconditionError(f"Unknown config keys in {path}: {', '.join(unknown)}")
    logger.debug('Loaded config file %s', path)
    return data


def load_config(
    flags: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
    config_file: str | os.PathLike | None = None,
) -> Config:
    """
    Resolve a Config from flags, environment, config file and defaults.

    Args:
        flags: Values given on the command line; None entries are ignored
        environ: Environment mapping (defaults to os.environ)
        config_file: Explicit config path (defaults to NTOS_CONFIG or the XDG path)

    Returns:
        Config: Fully resolved settings

    Example:
        >>> load_config({'threads': 2}, environ={}).threads
        2
    """
    environ = os.environ if environ is None else environ
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    path = Path(config_file) if config_file is not None else default_config_file(environ)
    layers = [read_config_file(path)]
    layers.append({key: environ[name] for key, name in _ENV_NAMES.items() if environ.get(name)})
    layers.append(flags)

    merged: dict[str, Any] = {
        'cache_dir': default_cache_dir(),
        'work_budget': DEFAULT_WORK_BUDGET,
        'threads': 'auto',
        'output_format': 'text',
    }
    for layer in layers:
        merged.update({k: layer[k] for k in KEYS if k in layer})

    return Config(
        cache_dir=Path(merged['cache_dir']).expanduser(),
        work_budget=_parse_budget(merged['work_budget']),
        threads=_parse_threads(merged['threads']),
        output_format=str(merged['output_format']).lower(),
    )
