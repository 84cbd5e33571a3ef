"""
Run configuration: a key = value file merged with command-line overrides.

The file has no section header; it is read with configparser under an implicit
[sfcov] section. Relative paths resolve against the file's directory.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

from .constants import (
    DEFAULT_ASSERT_PREFIXES,
    DEFAULT_PERCENTAGES,
    DEFAULT_REPETITIONS,
    DEFAULT_SEED,
    MODE_INVARIANTS,
    ORACLE_MODES,
    OUTPUT_FORMATS,
)
from .errors import ConfigError

SECTION = "sfcov"

_PATH_KEYS = ("kill_matrix", "coverage_matrix", "failing_tests", "labels_cache", "out_dir")
_PATH_LIST_KEYS = ("sources",)
_LIST_KEYS = ("sources", "roots", "assert_prefixes", "formats", "percentages")
_BOOL_KEYS = ("recursion_as_iteration", "strict_loop_bodies", "no_inherited")
_INT_KEYS = ("seed", "repetitions", "workers")


@dataclass
class RunConfig:
    sources: List[str] = field(default_factory=list)
    roots: List[str] = field(default_factory=list)
    oracles: str = MODE_INVARIANTS
    selector: Optional[str] = None
    assert_prefixes: List[str] = field(default_factory=lambda: list(DEFAULT_ASSERT_PREFIXES))
    recursion_as_iteration: bool = False
    strict_loop_bodies: bool = False
    no_inherited: bool = False
    kill_matrix: Optional[str] = None
    coverage_matrix: Optional[str] = None
    failing_tests: Optional[str] = None
    labels_cache: Optional[str] = None
    seed: int = DEFAULT_SEED
    repetitions: int = DEFAULT_REPETITIONS
    out_dir: str = "sfcov-out"
    formats: List[str] = field(default_factory=lambda: list(OUTPUT_FORMATS))
    project: str = ""
    bug_id: str = ""
    percentages: List[int] = field(default_factory=lambda: list(DEFAULT_PERCENTAGES))
    workers: int = 1

    def __post_init__(self) -> None:
        if self.oracles not in ORACLE_MODES:
            raise ConfigError(f"oracles must be one of {', '.join(ORACLE_MODES)}, got {self.oracles!r}")
        unknown = [f for f in self.formats if f not in OUTPUT_FORMATS]
        if unknown:
            raise ConfigError(f"Unknown output format(s): {', '.join(unknown)}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            self.percentages = [int(p) for p in self.percentages]
        except ValueError as e:
            raise ConfigError(f"percentages must be integers: {e}") from e
        bad = [p for p in self.percentages if not 0 < p <= 100]
        if bad:
            raise ConfigError(f"percentages must lie in (0, 100], got {bad}")

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = sorted(set(data) - known)
        if extra:
            raise ConfigError(f"Unknown config key(s): {', '.join(extra)}")
        return cls(**{k: v for k, v in data.items() if v is not None})

    def merged(self, overrides: Dict[str, Any]) -> "RunConfig":
        """A copy with every non-None override applied (CLI flags win over the file)."""
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_dict(data)


def _split(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _parse_bool(key: str, value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} expects a boolean, got {value!r}")


def parse_config_text(text: str, base_dir: str = ".") -> Dict[str, Any]:
    """Parse key = value text into typed config values (paths made absolute)."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(f"[{SECTION}]\n{text}")
    except configparser.Error as e:
        raise ConfigError(f"Malformed config: {e}") from e

    data: Dict[str, Any] = {}
    for key, raw in parser.items(SECTION):
        key = key.strip().replace("-", "_")
        value: Any = raw.strip()
        if key in _LIST_KEYS:
            value = _split(value)
        elif key in _BOOL_KEYS:
            value = _parse_bool(key, value)
        elif key in _INT_KEYS:
            try:
                value = int(value)
            except ValueError as e:
                raise ConfigError(f"{key} expects an integer, got {raw!r}") from e
        if key in _PATH_KEYS and value:
            value = os.path.normpath(os.path.join(base_dir, value))
        elif key in _PATH_LIST_KEYS:
            value = [os.path.normpath(os.path.join(base_dir, v)) for v in value]
        data[key] = value
    return data


def load_run_config(path: Optional[str], overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read the config file (if any) and apply overrides on top."""
    data: Dict[str, Any] = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        data = parse_config_text(text, os.path.dirname(os.path.abspath(path)))
    config = RunConfig.from_dict(data)
    return config.merged(overrides or {})
