"""Run settings: shipped defaults, optional config file, command-line overrides."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .history import DEFAULT_EXTENSIONS

SECTION = "doeimpact"


@dataclass(frozen=True)
class Settings:
    copy_rate: float
    fractions: tuple[float, ...]
    coverage: float
    normalized_min: float
    absolute_min: float
    seed: int
    jobs: int
    format: str
    out_dir: str
    branch: str | None
    extensions: tuple[str, ...] | None
    follow_renames: bool
    first_parent: bool
    floor_days: bool
    language_rates: bool
    trim_whitespace: bool
    parallelism: int

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["fractions"] = list(self.fractions)
        out["extensions"] = None if self.extensions is None else list(self.extensions)
        return out

    def merged(self, overrides: Mapping[str, Any]) -> Settings:
        """Apply every known key; None is a real value here (e.g. all extensions)."""
        known = {f.name for f in fields(self)}
        return replace(self, **{k: v for k, v in overrides.items() if k in known})


def parse_fractions(text: str) -> tuple[float, ...]:
    values = tuple(float(part) for part in text.split(",") if part.strip())
    for v in values:
        if not 0 <= v <= 1:
            raise ValueError(f"fraction {v} outside [0, 1]")
    return values


def parse_extensions(text: str) -> tuple[str, ...] | None:
    text = text.strip()
    if text == "*":
        return None
    if text in ("", "default"):
        return DEFAULT_EXTENSIONS
    return tuple(sorted({e.strip().lower() if e.strip().startswith(".") else "." + e.strip().lower() for e in text.split(",") if e.strip()}))


_BOOLEANS = {"follow_renames", "first_parent", "floor_days", "language_rates", "trim_whitespace"}
_FLOATS = {"copy_rate", "coverage", "normalized_min", "absolute_min"}
_INTS = {"seed", "jobs", "parallelism"}


def _convert(section: configparser.SectionProxy) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key in section:
        raw = section[key]
        if key in _BOOLEANS:
            out[key] = section.getboolean(key)
        elif key in _FLOATS:
            out[key] = float(raw)
        elif key in _INTS:
            out[key] = int(raw)
        elif key == "fractions":
            out[key] = parse_fractions(raw)
        elif key == "extensions":
            out[key] = parse_extensions(raw)
        elif key == "branch":
            out[key] = raw.strip() or None
        elif key in ("format", "out_dir"):
            out[key] = raw.strip()
        else:
            raise ValueError(f"unknown configuration key {key!r}")
    return out


def read_config(text: str) -> dict[str, Any]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValueError(str(exc)) from exc
    if not parser.has_section(SECTION):
        raise ValueError(f"configuration lacks a [{SECTION}] section")
    return _convert(parser[SECTION])


def default_config_text() -> str:
    return resources.files(__package__).joinpath("default_config.ini").read_text(encoding="utf-8")


def default_settings() -> Settings:
    return Settings(**read_config(default_config_text()))


def load_settings(config_path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> Settings:
    settings = default_settings()
    if config_path is not None:
        settings = settings.merged(read_config(Path(config_path).read_text(encoding="utf-8")))
    if overrides:
        settings = settings.merged(overrides)
    return settings
