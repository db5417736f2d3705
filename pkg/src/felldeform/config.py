"""Run configuration: a ``key = value`` file merged with command-line flags."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

MODELS = ("torus", "sphere", "lens", "heisenberg")

DEFAULT_PAIRS = {
    "torus": ("U", "V"),
    "sphere": ("W", "Z"),
    "lens": ("W", "Z"),
    "heisenberg": ("B", "A"),
}
DEFAULT_PHI = {"torus": "U + V", "sphere": "Z + W", "lens": "Z + W", "heisenberg": "A + B"}
DEFAULT_XI = {
    "torus": ("U* + V*", "1 + U*"),
    "sphere": ("Z* + W*", "1 + Z*"),
    "lens": ("Z* + W*", "1 + Z*"),
    "heisenberg": ("A + B*", "1 + B*"),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "verify"
    model: str = "sphere"
    theta: float = 0.0
    p: int = 3
    q: int = 1
    c: int = 1
    mu: float = 0.11
    nu: float = 0.23
    grid: int | None = None
    hbar_min: float | None = None
    hbar_max: float | None = None
    hbar_count: int | None = None
    log: bool | None = None
    seed: int = 0
    out: str | None = None
    cutoff: int = 8
    f: str | None = None
    g: str | None = None
    expr: str | None = None
    phi: str | None = None
    xi: tuple[str, ...] = field(default_factory=tuple)
    trials: int = 32
    triples: int = 3

    def resolved(self) -> "RunConfig":
        """Fill command-dependent defaults and validate."""
        cfg = dataclasses.replace(self)
        if cfg.model not in MODELS:
            raise ConfigError(f"unknown model {cfg.model!r}; choose from {', '.join(MODELS)}")
        field_like = cfg.command == "field-scan"
        if cfg.hbar_min is None:
            cfg.hbar_min = 0.0 if field_like else 1e-4
        if cfg.hbar_max is None:
            cfg.hbar_max = 0.5 if field_like else 1e-1
        if cfg.hbar_count is None:
            cfg.hbar_count = 11 if field_like else 25
        if cfg.log is None:
            cfg.log = not field_like
        if cfg.f is None or cfg.g is None:
            f, g = DEFAULT_PAIRS[cfg.model]
            cfg.f = cfg.f if cfg.f is not None else f
            cfg.g = cfg.g if cfg.g is not None else g
        if cfg.phi is None:
            cfg.phi = DEFAULT_PHI[cfg.model]
        if not cfg.xi:
            cfg.xi = DEFAULT_XI[cfg.model]
        cfg.validate()
        return cfg

    def validate(self):
        if self.hbar_count < 1:
            raise ConfigError("hbar_count must be >= 1")
        if self.hbar_max < self.hbar_min:
            raise ConfigError("hbar_max must be >= hbar_min")
        if self.log and self.hbar_min <= 0:
            raise ConfigError("a log-spaced hbar grid needs hbar_min > 0")
        if self.model == "lens":
            if self.p == 0:
                raise ConfigError("lens space needs p != 0")
            if math.gcd(self.p, self.q) != 1:
                raise ConfigError(f"lens space needs coprime p, q; got p={self.p}, q={self.q}")
        if self.model == "heisenberg" and self.c < 1:
            raise ConfigError("c must be a positive integer")
        if self.grid is not None and (self.grid < 8 or self.grid & (self.grid - 1)):
            raise ConfigError("grid must be a power of two >= 8")
        if self.cutoff < 0:
            raise ConfigError("cutoff must be >= 0")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")

    def hbar_grid(self):
        import numpy as np

        if self.hbar_count == 1:
            return np.array([self.hbar_min])
        if self.log:
            return np.logspace(math.log10(self.hbar_min), math.log10(self.hbar_max), self.hbar_count)
        return np.linspace(self.hbar_min, self.hbar_max, self.hbar_count)

    def metadata(self) -> dict[str, object]:
        meta = {}
        for k, v in dataclasses.asdict(self).items():
            if k == "out":
                continue  # where the bytes go is not part of what they say
            if isinstance(v, tuple):
                v = " ; ".join(v)
            meta[k] = "" if v is None else v
        return meta


FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_INT = {"p", "q", "c", "grid", "hbar_count", "seed", "cutoff", "trials", "triples"}
_FLOAT = {"theta", "mu", "nu", "hbar_min", "hbar_max"}


def coerce(key: str, raw: str):
    key = key.replace("-", "_")
    if key not in FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    raw = raw.strip()
    try:
        if key in _INT:
            return key, int(raw)
        if key in _FLOAT:
            return key, float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    if key == "log":
        low = raw.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"bad boolean for log: {raw!r}")
        return key, low in ("true", "1", "yes")
    if key == "xi":
        return key, tuple(s.strip() for s in raw.split(";") if s.strip())
    return key, raw


def parse_config_text(text: str) -> dict[str, object]:
    out: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, _, v = s.partition("=")
        k, val = coerce(k.strip(), v)
        out[k] = val
    return out


def load_config_file(path: str | Path) -> dict[str, object]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return parse_config_text(text)


def config_from_csv_header(text: str) -> dict[str, object]:
    """Recover the RunConfig values embedded in a CSV's ``#`` header."""
    out: dict[str, object] = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        k, _, v = line[1:].strip().partition(" = ")
        if k in FIELDS and v != "":
            out[k] = coerce(k, v)[1]
    return out
