"""Run configuration: one JSON file or command-line flags (flags win)."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields

from .errors import ConfigError

COMMANDS = ("bowl", "wing", "degenerate", "verify", "sweep")
OUTPUT_ENV = "TRANSLATORS_OUTPUT_DIR"


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, "out")


@dataclass
class RunConfig:
    command: str
    family: str = "mean"
    n: int = 3
    k: int | None = None
    expr: str | None = None
    r_max: float | None = None
    rtol: float = 1e-10
    atol: float = 1e-12
    R: float = 1.0
    output_dir: str = field(default_factory=default_output_dir)
    plot: bool = False
    sweep_n: list = field(default_factory=lambda: [3, 4, 5])
    workers: int = 4

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.r_max is not None and not self.r_max > 0:
            raise ConfigError("r_max must be positive")
        if not self.rtol > 0 or not self.atol > 0 or not self.R > 0:
            raise ConfigError("rtol, atol and R must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def radius(self) -> float:
        """r_max, or the per-command default when not given."""
        if self.r_max is not None:
            return float(self.r_max)
        if self.command == "degenerate":
            return 3.0 if self.n == 2 else 100.0
        return 100.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        if "command" not in data:
            raise ConfigError("config needs a 'command'")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config JSON: {exc}") from None
        return cls.from_dict(data)


def merge(base: dict, overrides: dict) -> dict:
    """Flags override file values; None means 'not given'."""
    out = dict(base)
    out.update({k: v for k, v in overrides.items() if v is not None})
    return out
