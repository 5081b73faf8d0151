"""Sweep configuration: plain-text ``key = value`` files with '#' comments."""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError

__all__ = ["SweepConfig", "EXPERIMENT_KINDS", "parse_config", "load_config", "format_config"]

EXPERIMENT_KINDS = ("soundhard_tube", "cloak_tube", "soundhard_screen", "cloak_screen", "asymptotic_compare")


@dataclass(frozen=True)
class SweepConfig:
    """All parameters of one sweep. Every field is a config key."""

    kind: str = "soundhard_tube"
    omega: float = 1.0
    deltas: tuple = (0.2, 0.14, 0.1, 0.07, 0.05)
    epsilons: tuple = (0.0,)
    # lossy layer and content
    gamma: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    sigma_a: float = 1.0
    q_a: complex = 1.0
    model: str = "pushforward"
    # thin-tube formula used by asymptotic_compare
    variant: str = "corrected"
    # direction grids
    n_theta_dirs: int = 12
    n_phi_dirs: int = 24
    n_incident: int = 6
    n_azimuths: int = 3
    # tube
    curve: str = "straight"
    length: float = 1.0
    arc_radius: float = 2.0
    tube_n_theta: int = 16
    tube_order: int = 8
    tube_h_max: float = 0.25
    cap_order: int = 8
    # screen
    screen_side: float = 1.0
    screen_order: int = 8
    screen_n_face: int = 1
    screen_edge: float = 0.05
    side_order: int = 8
    corner_order: int = 6
    # inner body and quadrature
    inner_order: int = 8
    near_factor: float = 0.5
    leaf_order: int = 6
    # bookkeeping
    output: str = "sweep.csv"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"kind must be one of {EXPERIMENT_KINDS}")
        if not self.omega > 0:
            raise ConfigError("omega must be positive")
        d = np.asarray(self.deltas, float)
        if d.size < 1 or np.any(d <= 0) or np.any(np.diff(d) >= 0):
            raise ConfigError("deltas must be positive and strictly decreasing")
        e = np.asarray(self.epsilons, float)
        if e.size < 1 or np.any(e < 0) or np.any(e >= 1) or np.any(np.diff(e) >= 0):
            raise ConfigError("epsilons must lie in [0, 1) and be strictly decreasing")
        if not (self.gamma > 0 and self.alpha > 0 and self.beta >= 0 and self.sigma_a > 0):
            raise ConfigError("lossy and content parameters out of range")
        q = complex(self.q_a)
        if q.real <= 0 or q.imag < 0:
            raise ConfigError("q_a needs Re > 0 and Im >= 0")
        if self.variant not in ("corrected", "literal"):
            raise ConfigError("variant must be 'corrected' or 'literal'")
        if self.curve not in ("straight", "arc"):
            raise ConfigError("curve must be 'straight' or 'arc'")
        for name in ("n_theta_dirs", "n_phi_dirs", "n_incident", "n_azimuths"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        object.__setattr__(self, "deltas", tuple(float(x) for x in d))
        object.__setattr__(self, "epsilons", tuple(float(x) for x in e))
        object.__setattr__(self, "q_a", q)

    def replace(self, **kw) -> SweepConfig:
        return dataclasses.replace(self, **kw)


_FIELDS = {f.name: f for f in dataclasses.fields(SweepConfig)}


_SECTION = "sweep"


def _convert(name: str, raw: str):
    f = _FIELDS[name]
    default = f.default
    try:
        if name in ("deltas", "epsilons"):
            return tuple(float(v) for v in raw.replace(",", " ").split())
        if f.type == "complex":
            return complex(raw.replace(" ", "").replace("i", "j"))
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config(text: str) -> SweepConfig:
    """INI-style ``key = value`` lines; an optional ``[sweep]`` header."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    body = text if text.lstrip().startswith("[") else f"[{_SECTION}]\n{text}"
    try:
        parser.read_string(body)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if not parser.has_section(_SECTION):
        raise ConfigError(f"config needs a [{_SECTION}] section")
    values = {}
    for key, raw in parser.items(_SECTION):
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _convert(key, raw.strip())
    return SweepConfig(**values)


def load_config(path) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(repr(x) for x in v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+.17g}j"
    return str(v) if not isinstance(v, float) else repr(v)


def format_config(cfg: SweepConfig) -> str:
    """Inverse of :func:`parse_config`."""
    return f"[{_SECTION}]\n" + "".join(f"{name} = {_fmt(getattr(cfg, name))}\n" for name in _FIELDS)
