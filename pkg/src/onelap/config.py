"""Flat key=value run configuration.

One `key = value` pair per line, `#` comments, no sections.  Unknown keys
and malformed values are reported by name so a typo fails loudly instead
of silently running defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["RunConfig", "parse_config", "ConfigError"]


class ConfigError(ValueError):
    pass


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


@dataclass
class RunConfig:
    """Everything a run needs: domain, mesh, parameters, schedules, knobs."""

    kind: str = "rect"             # "interval" or "rect"
    lx: float = 1.0
    ly: float = 1.0
    nx: int = 16
    ny: int = 16
    q: float = 1.5
    beta: float = 0.2
    p: float = 1.05
    p_bar: float = 1.3
    p_values: list[float] = field(default_factory=list)
    beta_values: list[float] = field(default_factory=list)
    eps_g: float = 1e-6
    m: int = 16
    max_outer: int = 400
    degree: int = 5

    def __post_init__(self) -> None:
        if self.kind not in ("interval", "rect"):
            raise ConfigError(f"kind must be 'interval' or 'rect', got {self.kind!r}")
        if self.nx < 2 or (self.kind == "rect" and self.ny < 2):
            raise ConfigError("nx and ny must be >= 2")
        if self.lx <= 0 or (self.kind == "rect" and self.ly <= 0):
            raise ConfigError("lx and ly must be positive")
        # exponent constraints (N = 2 both for the square and for the 1D
        # model problem): 1 < q < N/(N-1) = 2, threshold approach p_bar < q
        if not 1.0 < self.q < 2.0:
            raise ConfigError(f"q must satisfy 1 < q < 2, got {self.q}")
        if not 1.0 < self.p_bar < self.q:
            raise ConfigError(
                f"p_bar must satisfy 1 < p_bar < q, got p_bar={self.p_bar}")
        for name, val in [("p", self.p)] + [("p_values", v)
                                            for v in self.p_values]:
            if not 1.0 < val <= self.p_bar:
                raise ConfigError(
                    f"{name} entries must lie in (1, p_bar], got {val}")
        if self.beta < 0 or any(b < 0 for b in self.beta_values):
            raise ConfigError("beta values must be nonnegative")

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2


_PARSERS = {
    "kind": str,
    "lx": float,
    "ly": float,
    "nx": int,
    "ny": int,
    "q": float,
    "beta": float,
    "p": float,
    "p_bar": float,
    "p_values": _float_list,
    "beta_values": _float_list,
    "eps_g": float,
    "m": int,
    "max_outer": int,
    "degree": int,
}


def parse_config(source: str | Path) -> RunConfig:
    """Parse a config file (or literal text containing a newline)."""
    text = str(source)
    if "\n" not in text and "=" not in text:
        text = Path(source).read_text()
    kv: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in kv:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            kv[key] = _PARSERS[key](value)
        except (ValueError, TypeError) as err:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {err}") from err
    return RunConfig(**kv)
