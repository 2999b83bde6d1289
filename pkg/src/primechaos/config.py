"""Run configuration: defaults, ``key = value`` config files and provenance."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ParseError
from .rmt_mc import DEFAULT_SEED
from .sieve import DEFAULT_SEGMENT_SIZE

CONFIG_ENV = "PRIMECHAOS_CONFIG"


@dataclass(frozen=True)
class Config:
    bin_width: float = 0.1
    s_max: float = 4.0
    window_step: float = 0.25
    l_min: float = 0.1
    l_max: float = 5.0
    dl: float = 0.1
    fit_l_max: float = 5.0
    alt_fit_l_max: float = 3.0
    sat_points: int = 40
    sat_l_min: float = 0.5
    sat_fraction: float = 0.49
    segment_size: int = DEFAULT_SEGMENT_SIZE
    workers: int = 1
    seed: int = DEFAULT_SEED
    method: str = "riemann_r"

    @classmethod
    def parse(cls, text: str, path=None) -> "Config":
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip().replace("-", "_"), val.strip()
            if not sep:
                raise ParseError("expected 'key = value'", lineno, path)
            if key not in types:
                raise ParseError(f"unknown config key {key!r}", lineno, path)
            values[key] = _convert(types[key], val, lineno, path)
        return cls(**values)

    @classmethod
    def load(cls, path=None) -> "Config":
        """Read ``path``, else the file named by $PRIMECHAOS_CONFIG, else defaults."""
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        p = Path(path)
        if not p.is_file():
            raise ParseError(f"config file not found: {p}")
        return cls.parse(p.read_text(), path=str(p))

    def override(self, **kwargs) -> "Config":
        return dataclasses.replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def describe(self) -> str:
        return " ".join(f"{f.name}={getattr(self, f.name)}" for f in fields(self))


def _convert(type_name, val, lineno, path):
    kind = type_name if isinstance(type_name, str) else type_name.__name__
    try:
        if kind == "int":
            return int(float(val)) if "e" in val.lower() else int(val)
        if kind == "float":
            return float(val)
        return val
    except ValueError:
        raise ParseError(f"bad {kind} value {val!r}", lineno, path) from None
