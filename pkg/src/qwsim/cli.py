"""Command-line front end.

    qwsim <evolve|sweep|analyze|check> [--config FILE] [--preset NAME]
          [--set key=value ...] [--out FILE] [--threads N]

Data goes to --out (or stdout) as CSV with a mandatory header and floats in
scientific notation with 12 significant digits; a `<out>.meta.json` sidecar
records the resolved configuration and integrator statistics. Output contains
no timestamps, so identical inputs produce identical files.

Exit codes: 0 success, 1 configuration error, 2 integration failure,
3 invariant breach; failures emit one machine-readable line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analysis, checks, config as config_mod, integrator, model, sweep
from .errors import (ConfigError, InvariantBreach, QwsimError, StepUnderflow,
                     SweepAborted)

EXIT_CONFIG = 1
EXIT_INTEGRATION = 2
EXIT_INVARIANT = 3

_FMT = "%.11e"  # 12 significant digits


def _fmt_row(values) -> str:
    return ",".join(_FMT % v for v in values)


def _resolve_config(args) -> config_mod.RunConfig:
    pieces = []
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            pieces.append(fh.read())
    if args.preset is not None:
        pieces.append(f"preset = {args.preset}")
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        pieces.append(f"{key} = {value}")
    cfg = config_mod.parse_config("\n".join(pieces))
    if args.threads is not None:
        threads = args.threads
    elif "QWSIM_THREADS" in os.environ:
        try:
            threads = int(os.environ["QWSIM_THREADS"])
        except ValueError:
            raise ConfigError(
                f"QWSIM_THREADS is not an integer: {os.environ['QWSIM_THREADS']!r}")
    else:
        threads = cfg.threads
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return config_mod.RunConfig(
        base=cfg.base, variable=cfg.variable, grid_start=cfg.grid_start,
        grid_stop=cfg.grid_stop, grid_points=cfg.grid_points, threads=threads)


def _emit(args, header: list, rows: list, stats: dict,
          cfg: config_mod.RunConfig) -> None:
    text = ",".join(header) + "\n" + "".join(r + "\n" for r in rows)
    if args.out is None:
        sys.stdout.write(text)
        return
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    meta = {"config": config_mod.flatten(cfg), "integrator_stats": stats}
    with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


_COHERENCES = ("rho12", "rho13", "rho14", "rho23", "rho24", "rho34")

EVOLVE_COLUMNS = (["t", "rho11", "rho22", "rho33", "rho44"]
                  + [f"{part}_{name}" for name in _COHERENCES
                     for part in ("re", "im")]
                  + ["trace"])
SWEEP_COLUMNS = ["sweep_value", "rho11", "rho22", "rho33", "rho44",
                 "trace_drift"]
ANALYZE_COLUMNS = ["theta", "phi", "gamma_f", "asymptotic_c1_sq",
                   "asymptotic_c2_sq"]


def cmd_evolve(args, cfg: config_mod.RunConfig) -> int:
    base = cfg.base
    traj = integrator.integrate(
        model.DensityMatrix.ground_state(), base.system, base.pulses,
        base.detuning, base.integrator)
    rows = []
    for i, t in enumerate(traj.times):
        y = traj.ys[i]
        rows.append(_fmt_row([t, *y[:4], *y[4:], y[:4].sum()]))
    stats = {"steps": traj.stats.steps,
             "max_trace_drift": traj.stats.max_trace_drift}
    _emit(args, EVOLVE_COLUMNS, rows, stats, cfg)
    return 0


def cmd_sweep(args, cfg: config_mod.RunConfig) -> int:
    result = sweep.run_sweep(cfg.sweep_spec(), workers=cfg.threads)
    rows = [
        _fmt_row([result.values[i], *result.populations[i],
                  result.trace_drift[i]])
        for i in range(len(result.values))
    ]
    stats = {"points": len(result.values),
             "max_trace_drift": float(result.trace_drift.max())}
    _emit(args, SWEEP_COLUMNS, rows, stats, cfg)
    return 0


def cmd_analyze(args, cfg: config_mod.RunConfig) -> int:
    base = cfg.base
    pulses = base.pulses
    # mixing angles at the pulse-overlap midpoint, where both fields act
    t_mid = 0.5 * (pulses.t_p + pulses.t_s)
    omega_p, omega_s = model.rabi_envelope(t_mid, pulses)
    theta = analysis.mixing_theta(omega_p, omega_s)
    phi = analysis.mixing_phi(omega_p, omega_s, base.system.omega43)
    gamma_f = analysis.berry_phase(pulses, base.system.omega43)
    rows = [_fmt_row([theta, phi, gamma_f,
                      math.sin(gamma_f) ** 2, math.cos(gamma_f) ** 2])]
    _emit(args, ANALYZE_COLUMNS, rows, {}, cfg)
    return 0


def cmd_check(args, cfg: config_mod.RunConfig) -> int:
    results = checks.run_all()
    out = sys.stdout if args.out is None else open(args.out, "w",
                                                   encoding="utf-8")
    try:
        failed = []
        for name, ok, detail in results:
            out.write(f"check {name}: {'PASS' if ok else 'FAIL'} ({detail})\n")
            if not ok:
                failed.append(name)
    finally:
        if out is not sys.stdout:
            out.close()
    if failed:
        raise InvariantBreach("failed checks: " + ", ".join(failed))
    return 0


_COMMANDS = {
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwsim",
        description="Four-subband double-well population-transfer simulator")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", metavar="FILE",
                        help="key=value configuration file")
    parser.add_argument("--preset", metavar="NAME",
                        help="named experiment (%s)" % ", ".join(sweep.PRESET_NAMES))
    parser.add_argument("--set", metavar="KEY=VALUE", action="append",
                        help="override a single config key (repeatable)")
    parser.add_argument("--out", metavar="FILE",
                        help="CSV output path (default: stdout)")
    parser.add_argument("--threads", type=int, metavar="N",
                        help="sweep worker count (or QWSIM_THREADS)")
    return parser


def _fail(code: int, exc: Exception) -> int:
    line = json.dumps({"code": code, "kind": type(exc).__name__,
                       "message": str(exc)})
    sys.stderr.write("qwsim-error: " + line + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except OSError as exc:
        return _fail(EXIT_CONFIG, exc)
    try:
        return _COMMANDS[args.command](args, cfg)
    except SweepAborted as exc:
        if isinstance(exc.cause, InvariantBreach):
            return _fail(EXIT_INVARIANT, exc)
        return _fail(EXIT_INTEGRATION, exc)
    except StepUnderflow as exc:
        return _fail(EXIT_INTEGRATION, exc)
    except InvariantBreach as exc:
        return _fail(EXIT_INVARIANT, exc)
    except QwsimError as exc:
        return _fail(EXIT_INTEGRATION, exc)


if __name__ == "__main__":
    sys.exit(main())
