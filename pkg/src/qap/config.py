"""Experiment configuration: flat key/value files (INI sections or JSON).

Sections and keys:

    [spec]      m, k, hbar_tilde, T, x0, xT
    [init]      S10, S20, sigma10, sigma20, or t0 in place of S20
    [grid]      h, method, t_probe
    [optimize]  active, grad_tol, max_iter, penalty_weight, restarts, seed
    [sweep]     t0_grid, hbar_grid
    [output]    out_dir

Grids are comma-separated values or a ``start:stop:count`` linspace
shorthand. Unknown sections or keys are rejected: silently ignored
typos are worse than a hard error in a reproducibility tool.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .model import InitialData, OscillatorSpec, t0_to_S20

_SPEC_KEYS = ("m", "k", "hbar_tilde", "T", "x0", "xT")
_INIT_KEYS = ("S10", "S20", "sigma10", "sigma20", "t0")
_GRID_KEYS = ("h", "method", "t_probe")
_OPT_KEYS = ("active", "grad_tol", "max_iter", "penalty_weight", "restarts", "seed")
_SWEEP_KEYS = ("t0_grid", "hbar_grid")
_OUTPUT_KEYS = ("out_dir",)
_SECTIONS = {
    "spec": _SPEC_KEYS,
    "init": _INIT_KEYS,
    "grid": _GRID_KEYS,
    "optimize": _OPT_KEYS,
    "sweep": _SWEEP_KEYS,
    "output": _OUTPUT_KEYS,
}


@dataclass
class ExperimentConfig:
    """Everything a command needs, assembled from one config file."""

    spec: OscillatorSpec = field(default_factory=OscillatorSpec)
    init: InitialData | None = None
    step: float = 1e-3
    method: str = "rk4"
    t_probe: float = 0.5
    active: str | None = None
    grad_tol: float = 1e-6
    max_iter: int = 2000
    penalty_weight: float = 0.0
    restarts: int = 5
    seed: int = 42
    t0_grid: list[float] | None = None
    hbar_grid: list[float] | None = None
    out_dir: str | None = None


def parse_grid(text: str) -> list[float]:
    """Parse ``a,b,c`` or ``start:stop:count`` into a float list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid shorthand must be start:stop:count, got {text!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError(f"grid count must be >= 1, got {count}")
        return [float(v) for v in np.linspace(start, stop, count)]
    values = [float(v) for v in text.split(",") if v.strip()]
    return values


def _check_grid(name: str, values: list[float]) -> list[float]:
    if not values:
        raise ConfigError(f"{name} is empty")
    if any(not math.isfinite(v) for v in values):
        raise ConfigError(f"{name} contains non-finite values")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{name} must be strictly increasing")
    return values


def _as_sections(path: Path) -> dict[str, dict[str, str]]:
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON config: {err}") from err
        if not isinstance(raw, dict):
            raise ConfigError("JSON config must be an object of sections")

        def as_text(v):
            if isinstance(v, list):
                return ",".join(str(x) for x in v)
            return str(v)

        return {
            str(sec): {str(k): as_text(v) for k, v in entries.items()}
            for sec, entries in raw.items()
        }
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=(";", "#")
    )
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"invalid config file: {err}") from err
    return {sec: dict(parser.items(sec)) for sec in parser.sections()}


def _lookup(entries: dict[str, str], key: str) -> str | None:
    # configparser lower-cases keys; accept either spelling
    if key in entries:
        return entries[key]
    return entries.get(key.lower())


def _float(entries, key, default):
    raw = _lookup(entries, key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError as err:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from err


def _int(entries, key, default):
    raw = _lookup(entries, key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as err:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from err


def load_config(path) -> ExperimentConfig:
    """Read and validate one INI or JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    sections = _as_sections(path)

    for sec, entries in sections.items():
        if sec not in _SECTIONS:
            raise ConfigError(f"unknown config section [{sec}]")
        allowed = {k.lower() for k in _SECTIONS[sec]}
        for key in entries:
            if key.lower() not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{sec}]")

    cfg = ExperimentConfig()

    spec_entries = sections.get("spec", {})
    cfg.spec = OscillatorSpec(
        m=_float(spec_entries, "m", 1.0),
        k=_float(spec_entries, "k", 1.0),
        hbar_tilde=_float(spec_entries, "hbar_tilde", 0.0),
        T=_float(spec_entries, "T", 1.0),
        x0=_float(spec_entries, "x0", 0.0),
        xT=_float(spec_entries, "xT", 1.0),
    )

    if "init" in sections:
        entries = sections["init"]
        t0 = _lookup(entries, "t0")
        s20 = _lookup(entries, "S20")
        if t0 is not None and s20 is not None:
            raise ConfigError("give either t0 or S20 in [init], not both")
        if t0 is not None:
            s20_value = t0_to_S20(float(t0), cfg.spec)
        else:
            s20_value = _float(entries, "S20", 0.0)
        cfg.init = InitialData(
            S10=_float(entries, "S10", 0.0),
            S20=s20_value,
            sigma10=_float(entries, "sigma10", 0.0),
            sigma20=_float(entries, "sigma20", 0.0),
        )

    grid_entries = sections.get("grid", {})
    cfg.step = _float(grid_entries, "h", cfg.step)
    method = _lookup(grid_entries, "method")
    if method is not None:
        cfg.method = method.strip()
    cfg.t_probe = _float(grid_entries, "t_probe", cfg.t_probe)

    opt_entries = sections.get("optimize", {})
    active = _lookup(opt_entries, "active")
    if active is not None:
        cfg.active = active.strip()
    cfg.grad_tol = _float(opt_entries, "grad_tol", cfg.grad_tol)
    cfg.max_iter = _int(opt_entries, "max_iter", cfg.max_iter)
    cfg.penalty_weight = _float(opt_entries, "penalty_weight", cfg.penalty_weight)
    cfg.restarts = _int(opt_entries, "restarts", cfg.restarts)
    cfg.seed = _int(opt_entries, "seed", cfg.seed)

    sweep_entries = sections.get("sweep", {})
    t0_grid = _lookup(sweep_entries, "t0_grid")
    if t0_grid is not None:
        cfg.t0_grid = _check_grid("t0_grid", parse_grid(t0_grid))
    hbar_grid = _lookup(sweep_entries, "hbar_grid")
    if hbar_grid is not None:
        cfg.hbar_grid = _check_grid("hbar_grid", parse_grid(hbar_grid))

    out_entries = sections.get("output", {})
    out_dir = _lookup(out_entries, "out_dir")
    if out_dir is not None:
        cfg.out_dir = out_dir.strip()

    if not (cfg.step > 0 and math.isfinite(cfg.step)):
        raise ConfigError(f"h must be positive and finite, got {cfg.step}")
    if cfg.method not in ("rk4", "rk4_adaptive"):
        raise ConfigError(f"method must be rk4 or rk4_adaptive, got {cfg.method!r}")
    return cfg
