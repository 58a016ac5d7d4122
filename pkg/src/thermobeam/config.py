"""Scenario configuration: flat key=value files, built-in presets, and
initial-condition construction."""

from __future__ import annotations

import csv
import math
import re
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ConfigError, ConfigValidationError, InvalidArgumentError
from .grid import Grid, coefficient_from_spec
from .operators import BeamState

__all__ = [
    "ScenarioConfig",
    "load_config",
    "parse_config_text",
    "resolve_scenario",
    "build_initial_state",
    "preset_names",
    "get_preset",
]

_CALL_RE = re.compile(r"^\s*([a-z_][a-z0-9_]*)\s*(?:\(([^)]*)\))?\s*$")


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario; every field has a validated default."""

    name: str = "scenario"
    length: float = 1.0
    n_cells: int = 400
    dt: float = 1e-3
    t_end: float = 10.0
    p: str = "constant(1.0)"
    q: str = "constant(1.0)"
    kappa: float = 1.0
    eta: float = 1.0
    initial_condition: str = "zero_u_gauss_theta(0.2, 1e-2, 0.5)"
    epsilon: Union[str, float] = "auto"
    record_stride: int = 10
    seed: int = 0

    @property
    def fit_window(self) -> Tuple[float, float]:
        return (self.t_end / 10.0, 0.8 * self.t_end)


_CONFIG_KEYS = {
    "length", "n_cells", "dt", "t_end", "p", "q", "kappa", "eta",
    "initial_condition", "epsilon", "record_stride", "seed",
}
_INT_KEYS = {"n_cells", "record_stride", "seed"}
_FLOAT_KEYS = {"length", "dt", "t_end", "kappa", "eta"}


def _parse_ic_spec(spec: str):
    m = _CALL_RE.match(spec)
    if not m:
        raise InvalidArgumentError(f"malformed initial condition {spec!r}")
    name, argstr = m.group(1), m.group(2)
    args = [] if argstr is None else [a.strip() for a in argstr.split(",") if a.strip()]
    if name == "zero_u_gauss_theta":
        if len(args) not in (2, 3):
            raise InvalidArgumentError(
                "zero_u_gauss_theta takes (amplitude, sigma2[, center])"
            )
        try:
            nums = [float(a) for a in args]
        except ValueError as exc:
            raise InvalidArgumentError(f"non-numeric argument in {spec!r}") from exc
        if not nums[1] > 0:
            raise InvalidArgumentError(f"sigma2 must be > 0 (got {nums[1]})")
        return ("zero_u_gauss_theta", nums)
    if name == "custom_samples":
        if len(args) != 1:
            raise InvalidArgumentError("custom_samples takes a single file path")
        return ("custom_samples", args)
    if name == "mms_state":
        if args:
            raise InvalidArgumentError("mms_state takes no arguments")
        return ("mms_state", [])
    raise InvalidArgumentError(
        f"unknown initial condition {name!r}; "
        "choose zero_u_gauss_theta(...), custom_samples(file) or mms_state"
    )


def _validate(cfg: ScenarioConfig) -> ScenarioConfig:
    problems = []
    if not (cfg.length > 0 and math.isfinite(cfg.length)):
        problems.append(f"length must be > 0 (got {cfg.length})")
    if cfg.n_cells < 4:
        problems.append(f"n_cells must be >= 4 (got {cfg.n_cells})")
    if not (cfg.dt > 0 and math.isfinite(cfg.dt)):
        problems.append(f"dt must be > 0 (got {cfg.dt})")
    if not cfg.t_end > cfg.dt:
        problems.append(f"t_end must exceed dt (got t_end={cfg.t_end}, dt={cfg.dt})")
    if not cfg.kappa > 0:
        problems.append(f"kappa must be > 0 (got {cfg.kappa})")
    if not cfg.eta > 0:
        problems.append(f"eta must be > 0 (got {cfg.eta})")
    if cfg.record_stride < 1:
        problems.append(f"record_stride must be >= 1 (got {cfg.record_stride})")
    for label in ("p", "q"):
        try:
            coefficient_from_spec(getattr(cfg, label))
        except InvalidArgumentError as exc:
            problems.append(f"{label}: {exc}")
    try:
        _parse_ic_spec(cfg.initial_condition)
    except InvalidArgumentError as exc:
        problems.append(f"initial_condition: {exc}")
    if cfg.epsilon != "auto":
        try:
            eps = float(cfg.epsilon)
            if not eps > 0:
                problems.append(f"epsilon must be > 0 or 'auto' (got {eps})")
        except (TypeError, ValueError):
            problems.append(f"epsilon must be a number or 'auto' (got {cfg.epsilon!r})")
    if problems:
        raise ConfigValidationError(problems)
    return cfg


def parse_config_text(text: str, name: str = "scenario") -> ScenarioConfig:
    """Parse the flat key = value format; '#' starts a comment. Unknown keys
    are rejected; all validation problems are reported in one error."""
    values = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "epsilon":
                values[key] = value if value == "auto" else float(value)
            else:
                values[key] = value
        except ValueError:
            problems.append(f"line {lineno}: cannot parse {key} = {value!r}")
    if problems:
        raise ConfigValidationError(problems)
    return _validate(ScenarioConfig(name=name, **values))


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(), name=path.stem)


def _fig1(sigma2: float, label: str) -> ScenarioConfig:
    return ScenarioConfig(
        name=label,
        initial_condition=f"zero_u_gauss_theta(0.2, {sigma2:g}, 0.5)",
    )


_PRESETS = {
    "fig1_sigma2_1e-4": _fig1(1e-4, "fig1_sigma2_1e-4"),
    "fig1_sigma2_1e-3": _fig1(1e-3, "fig1_sigma2_1e-3"),
    "fig1_sigma2_1e-2": _fig1(1e-2, "fig1_sigma2_1e-2"),
    "zero": ScenarioConfig(
        name="zero", initial_condition="zero_u_gauss_theta(0.0, 1e-2, 0.5)"
    ),
    "manufactured": ScenarioConfig(name="manufactured", initial_condition="mms_state"),
}

_PRESET_NOTES = {
    "fig1_sigma2_1e-4": "centered heat pulse, amplitude 0.2, sigma^2 = 1e-4",
    "fig1_sigma2_1e-3": "centered heat pulse, amplitude 0.2, sigma^2 = 1e-3",
    "fig1_sigma2_1e-2": "centered heat pulse, amplitude 0.2, sigma^2 = 1e-2",
    "zero": "zero initial data (energy identically zero)",
    "manufactured": "smooth verification fields as initial data",
}


def preset_names():
    return list(_PRESETS)


def preset_note(name: str) -> str:
    return _PRESET_NOTES[name]


def get_preset(name: str) -> ScenarioConfig:
    try:
        return _PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(_PRESETS)}"
        ) from None


def resolve_scenario(name_or_path: str) -> ScenarioConfig:
    """Interpret the argument as a preset name first, then as a file path."""
    if name_or_path in _PRESETS:
        return _PRESETS[name_or_path]
    return load_config(name_or_path)


def _read_samples(path: str, grid: Grid):
    p = Path(path)
    if not p.is_file():
        raise InvalidArgumentError(f"sample file not found: {p}")
    with p.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "u", "v", "theta"]:
            raise InvalidArgumentError(
                f"sample file {p} must have header x,u,v,theta (got {header})"
            )
        rows = [[float(c) for c in row] for row in reader if row]
    if len(rows) != grid.n_cells + 1:
        raise InvalidArgumentError(
            f"sample file {p} has {len(rows)} rows, grid needs {grid.n_cells + 1}"
        )
    data = np.array(rows)
    if not np.allclose(data[:, 0], grid.nodes, atol=1e-9 * grid.length, rtol=0):
        raise InvalidArgumentError(f"sample file {p} was written for a different grid")
    return data[1:-1, 1], data[1:-1, 2], data[1:-1, 3]


def build_initial_state(cfg: ScenarioConfig, grid: Grid) -> BeamState:
    """Construct the initial state on the grid from the configured selection."""
    kind, args = _parse_ic_spec(cfg.initial_condition)
    x = grid.interior
    if kind == "zero_u_gauss_theta":
        amplitude, sigma2 = args[0], args[1]
        center = args[2] if len(args) == 3 else 0.5 * grid.length
        sigma = math.sqrt(sigma2)
        if amplitude != 0.0 and sigma < 4.0 * grid.h:
            warnings.warn(
                f"heat pulse under-resolved: sigma = {sigma:.3g} < 4 h = "
                f"{4 * grid.h:.3g}; refine the grid",
                stacklevel=2,
            )
        theta = amplitude * np.exp(-((x - center) ** 2) / sigma2)
        zero = np.zeros_like(x)
        return BeamState(zero, zero.copy(), theta)
    if kind == "custom_samples":
        u, v, theta = _read_samples(args[0], grid)
        return BeamState(u, v, theta)
    if kind == "mms_state":
        s = np.sin(np.pi * x / grid.length)
        u = s * s
        return BeamState(u, -u, s)
    raise InvalidArgumentError(f"unhandled initial condition kind {kind!r}")


def with_sigma2(cfg: ScenarioConfig, sigma2: float) -> ScenarioConfig:
    """Derive a scenario with the heat-pulse width replaced (sweep support)."""
    kind, args = _parse_ic_spec(cfg.initial_condition)
    if kind != "zero_u_gauss_theta":
        raise InvalidArgumentError(
            "sigma2 sweep requires a zero_u_gauss_theta initial condition"
        )
    amplitude = args[0]
    center = args[2] if len(args) == 3 else 0.5 * cfg.length
    return replace(
        cfg,
        name=f"{cfg.name}_sigma2_{sigma2:g}",
        initial_condition=f"zero_u_gauss_theta({amplitude:g}, {sigma2:g}, {center:g})",
    )
