"""Flat key=value run configuration: parsing, validation, serialization.

Grammar: one `key = value` per line, `#` starts a comment, blank lines are
ignored. Values are decimal floats, integers, or bare identifiers. Unknown
keys are rejected. Units are fixed: energies and rates in meV, times in
meV^-1. A `preset = <name>` line supplies defaults for every other key;
without one, the documented global defaults (the fig2a bundle) apply.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import sweep
from .errors import ParseError, RangeError, UnknownKey, UnknownPreset
from .integrator import IntegratorConfig, Method
from .model import Detuning, PulseParams, SystemParams

_LINE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)\s*$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

_SYSTEM_KEYS = ("k", "q", "omega43", "gamma31", "gamma32", "gamma41",
                "gamma42", "gamma2", "dph12", "dph13", "dph14", "dph23",
                "dph24", "dph34")
_PULSE_KEYS = ("omega_p0", "omega_s0", "tau", "t_p", "t_s")
_DETUNING_KEYS = ("delta_p", "delta_s")
_INTEGRATOR_FLOAT_KEYS = ("step", "abs_tol", "rel_tol", "t_start", "t_end")
_IDENTIFIER_KEYS = ("preset", "fano_mode", "method", "variable")
_INT_KEYS = ("samples", "grid_points", "threads")

#: every key the config format accepts, in canonical serialization order
CANONICAL_KEYS = (
    _SYSTEM_KEYS + ("fano_mode", "epsilon") + _PULSE_KEYS + _DETUNING_KEYS
    + ("method",) + _INTEGRATOR_FLOAT_KEYS + ("samples",)
    + ("variable", "grid_start", "grid_stop", "grid_points", "threads")
)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameter bundle plus sweep-grid and worker settings."""

    base: sweep.BaseParams
    variable: sweep.SweepVariable
    grid_start: float
    grid_stop: float
    grid_points: int
    threads: int = 1

    def sweep_spec(self) -> sweep.SweepSpec:
        """Materialize the sweep this config describes."""
        if self.variable is sweep.SweepVariable.TIME:
            cfg = self.base.integrator
            grid = tuple(np.linspace(cfg.t_start, cfg.t_end, cfg.samples))
        else:
            grid = tuple(np.linspace(self.grid_start, self.grid_stop,
                                     self.grid_points))
        return sweep.SweepSpec(variable=self.variable, grid=grid,
                               base=self.base)


def _parse_value(line_no: int, token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    if _IDENT_RE.match(token):
        return token
    raise ParseError(line_no, f"cannot parse value {token!r}")


def _parse_items(text: str) -> list:
    items = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise ParseError(line_no, f"expected 'key = value', got {raw!r}")
        key, token = m.group(1), m.group(2)
        if key not in CANONICAL_KEYS and key != "preset":
            raise UnknownKey(f"line {line_no}: unknown key {key!r}")
        items.append((line_no, key, _parse_value(line_no, token)))
    return items


def _require_number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RangeError(f"{key} expects a number, got {value!r}")
    return float(value)


def _require_int(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise RangeError(f"{key} expects an integer, got {value!r}")
    return value


def _require_choice(key: str, value, choices) -> str:
    if value not in choices:
        raise RangeError(f"{key} must be one of {sorted(choices)}, got {value!r}")
    return value


def _build(flat: dict) -> RunConfig:
    mode = _require_choice("fano_mode", flat["fano_mode"],
                           {"physical", "target"})
    target_eps = None
    if mode == "target":
        eps = _require_number("epsilon", flat.get("epsilon", 0.0))
        if not 0.0 <= eps <= 1.0:
            raise RangeError(f"epsilon must lie in [0, 1], got {eps}")
        target_eps = eps
    elif "epsilon" in flat:
        raise RangeError("epsilon requires fano_mode = target")

    try:
        system = SystemParams(
            **{key: _require_number(key, flat[key]) for key in _SYSTEM_KEYS},
            target_epsilon=target_eps)
        pulses = PulseParams(
            **{key: _require_number(key, flat[key]) for key in _PULSE_KEYS})
    except ValueError as exc:
        raise RangeError(str(exc)) from exc
    detuning = Detuning(
        **{key: _require_number(key, flat[key]) for key in _DETUNING_KEYS})

    method = Method(_require_choice("method", flat["method"], {"rk4", "rk45"}))
    try:
        integ = IntegratorConfig(
            method=method,
            samples=_require_int("samples", flat["samples"]),
            **{key: _require_number(key, flat[key])
               for key in _INTEGRATOR_FLOAT_KEYS})
    except ValueError as exc:
        raise RangeError(str(exc)) from exc

    variable = sweep.SweepVariable(
        _require_choice("variable", flat["variable"],
                        {v.value for v in sweep.SweepVariable}))
    grid_start = _require_number("grid_start", flat["grid_start"])
    grid_stop = _require_number("grid_stop", flat["grid_stop"])
    grid_points = _require_int("grid_points", flat["grid_points"])
    if grid_points < 1:
        raise RangeError(f"grid_points must be >= 1, got {grid_points}")
    if variable is not sweep.SweepVariable.TIME and grid_points > 1 \
            and grid_stop <= grid_start:
        raise RangeError("grid_stop must exceed grid_start")
    threads = _require_int("threads", flat["threads"])
    if threads < 1:
        raise RangeError(f"threads must be >= 1, got {threads}")

    base = sweep.BaseParams(system=system, pulses=pulses, detuning=detuning,
                            integrator=integ)
    return RunConfig(base=base, variable=variable, grid_start=grid_start,
                     grid_stop=grid_stop, grid_points=grid_points,
                     threads=threads)


def flatten(config: RunConfig) -> dict:
    """Canonical flat key->value view of a resolved config."""
    system = config.base.system
    flat = {key: getattr(system, key) for key in _SYSTEM_KEYS}
    if system.target_epsilon is None:
        flat["fano_mode"] = "physical"
    else:
        flat["fano_mode"] = "target"
        flat["epsilon"] = system.target_epsilon
    for key in _PULSE_KEYS:
        flat[key] = getattr(config.base.pulses, key)
    for key in _DETUNING_KEYS:
        flat[key] = getattr(config.base.detuning, key)
    integ = config.base.integrator
    flat["method"] = integ.method.value
    for key in _INTEGRATOR_FLOAT_KEYS:
        flat[key] = getattr(integ, key)
    flat["samples"] = integ.samples
    flat["variable"] = config.variable.value
    flat["grid_start"] = config.grid_start
    flat["grid_stop"] = config.grid_stop
    flat["grid_points"] = config.grid_points
    flat["threads"] = config.threads
    return flat


def preset_defaults(name: str) -> dict:
    """Flat key set describing a named preset (before user overrides)."""
    try:
        spec = sweep.preset(name)
    except UnknownPreset:
        raise RangeError(f"unknown preset {name!r}") from None
    if spec.variable is sweep.SweepVariable.TIME:
        cfg = spec.base.integrator
        grid_start, grid_stop = cfg.t_start, cfg.t_end
        grid_points = cfg.samples
    else:
        grid_start, grid_stop = float(spec.grid[0]), float(spec.grid[-1])
        grid_points = len(spec.grid)
    stub = RunConfig(base=spec.base, variable=spec.variable,
                     grid_start=grid_start, grid_stop=grid_stop,
                     grid_points=grid_points)
    return flatten(stub)


def global_defaults() -> dict:
    """Defaults used when no preset is named: the fig2a bundle."""
    return preset_defaults("fig2a")


def parse_config(text: str) -> RunConfig:
    """Parse config text into a fully resolved RunConfig.

    Raises ParseError (with line number), UnknownKey, or RangeError.
    """
    items = _parse_items(text)
    preset_name = None
    overrides = {}
    for _, key, value in items:
        if key == "preset":
            if not isinstance(value, str):
                raise RangeError(f"preset expects a name, got {value!r}")
            preset_name = value
        else:
            overrides[key] = value
    flat = global_defaults() if preset_name is None \
        else preset_defaults(preset_name)
    flat.update(overrides)
    return _build(flat)


def serialize(config: RunConfig) -> str:
    """Config text that parses back to an equal RunConfig."""
    flat = flatten(config)
    lines = ["# qwsim run configuration (energies in meV, times in meV^-1)"]
    for key in CANONICAL_KEYS:
        if key in flat:
            value = flat[key]
            lines.append(f"{key} = {value!r}" if isinstance(value, float)
                         else f"{key} = {value}")
    return "\n".join(lines) + "\n"
