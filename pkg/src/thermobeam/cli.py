"""Command-line surface.

Exit codes: 0 success, 1 configuration/usage errors, 2 runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import analysis
from .config import preset_names, preset_note, resolve_scenario
from .diagnostics import DiagnosticsRecord, fit_decay
from .errors import (
    ConfigError,
    InvalidArgumentError,
    ThermobeamError,
)
from .grid import build_grid, coefficient_from_spec, sample_coefficients
from .operators import assemble_generator, banded_triplets
from .scenario import format_summary, run_scenario, run_sweep

__all__ = ["cli_dispatch", "main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermobeam",
        description="Structure-preserving simulator for a damped thermoelastic beam",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    sim = sub.add_parser("simulate", help="run a scenario and write CSV outputs")
    sim.add_argument("scenario", help="preset name or config file path")
    sim.add_argument("--out-dir", default=None, help="output directory")
    sim.add_argument("--abscissa", action="store_true",
                     help="also compute the dense spectral abscissa")
    sim.add_argument("--sweep", default=None, metavar="S2[,S2...]",
                     help="run one simulation per sigma^2 value, concurrently")
    sim.add_argument("--dump-operators", default=None, help=argparse.SUPPRESS)

    fit = sub.add_parser("decay-fit", help="fit a decay rate to a diagnostics CSV")
    fit.add_argument("csv", help="diagnostics CSV path")
    fit.add_argument("--window", nargs=2, type=float, metavar=("T0", "T1"),
                     default=None)

    spec = sub.add_parser("spectrum", help="spectral abscissa of the operator")
    spec.add_argument("scenario", help="preset name or config file path")
    grp = spec.add_mutually_exclusive_group()
    grp.add_argument("--dense", dest="method", action="store_const",
                     const="dense", default="dense")
    grp.add_argument("--power", dest="method", action="store_const",
                     const="shifted-power")

    diss = sub.add_parser("dissipativity", help="random-state dissipation certificate")
    diss.add_argument("scenario", help="preset name or config file path")
    diss.add_argument("--samples", type=int, default=1000)
    diss.add_argument("--seed", type=int, default=0)

    conv = sub.add_parser("convergence", help="manufactured-solution order study")
    conv.add_argument("--levels", type=int, default=3)

    sub.add_parser("presets", help="list built-in scenarios")
    return parser


def _operator_for(scenario: str):
    cfg = resolve_scenario(scenario)
    grid = build_grid(cfg.length, cfg.n_cells)
    coeffs = sample_coefficients(
        grid, coefficient_from_spec(cfg.p), coefficient_from_spec(cfg.q),
        kappa=cfg.kappa, eta=cfg.eta,
    )
    return cfg, assemble_generator(grid, coeffs)


def _cmd_simulate(args) -> int:
    cfg = resolve_scenario(args.scenario)
    if args.dump_operators:
        _, op = _operator_for(args.scenario)
        with open(args.dump_operators, "w", newline="\n") as fh:
            for label, matrix in (("d2", op.d2), ("bending", op.bending_op)):
                fh.write(f"# {label}\n")
                for i, j, v in banded_triplets(matrix):
                    fh.write(f"{i} {j} {v:.12e}\n")
        print(f"operator triplets written to {args.dump_operators}")
    if args.sweep:
        values = [float(s) for s in args.sweep.split(",") if s.strip()]
        if not values:
            raise InvalidArgumentError("--sweep needs at least one sigma^2 value")
        outputs = run_sweep(cfg, values, args.out_dir, args.abscissa)
        for out in outputs:
            print(format_summary(out))
            print()
        return 0
    out = run_scenario(cfg, args.out_dir, include_abscissa=args.abscissa)
    print(format_summary(out))
    return 0


def _read_diagnostics_csv(path: str):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"CSV not found: {p}")
    with p.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(header) != DiagnosticsRecord.CSV_HEADER:
            raise ConfigError(
                f"{p}: expected header '{DiagnosticsRecord.CSV_HEADER}', "
                f"got {header}"
            )
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise ConfigError(f"{p}: line {lineno}: expected 6 columns")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ConfigError(f"{p}: line {lineno}: non-numeric value") from None
            records.append(DiagnosticsRecord(*vals))
    return records


def _cmd_decay_fit(args) -> int:
    records = _read_diagnostics_csv(args.csv)
    window = tuple(args.window) if args.window else None
    fit = fit_decay(records, window)
    print(f"decay rate m      {fit.m:.12e}")
    print(f"prefactor M       {fit.M:.12e}")
    print(f"fit residual rms  {fit.residual_rms:.6e}")
    print(f"fit window        [{fit.fit_window[0]:g}, {fit.fit_window[1]:g}] "
          f"({fit.n_points} points)")
    return 0


def _cmd_spectrum(args) -> int:
    _, op = _operator_for(args.scenario)
    report = analysis.spectral_abscissa(op, method=args.method)
    print(f"method            {report.method}")
    print(f"eigenvalues       {report.n_eigs}")
    print(f"spectral abscissa {report.abscissa:.12e}")
    print(f"stable            {report.abscissa < 0.0}")
    return 0


def _cmd_dissipativity(args) -> int:
    if args.samples < 1:
        raise InvalidArgumentError("--samples must be >= 1")
    cfg, op = _operator_for(args.scenario)
    defect = analysis.dissipativity_certificate(op, args.samples, args.seed)
    print(f"scenario          {cfg.name}")
    print(f"samples / seed    {args.samples} / {args.seed}")
    print(f"max defect        {defect:.12e}")
    print(f"certificate       {'pass' if defect < analysis.CERTIFICATE_TOLERANCE else 'FAIL'} "
          f"(tolerance {analysis.CERTIFICATE_TOLERANCE:g})")
    return 0 if defect < analysis.CERTIFICATE_TOLERANCE else 2


def _cmd_convergence(args) -> int:
    study = analysis.manufactured_convergence(levels=args.levels)
    print("spatial grids     " + ", ".join(str(n) for n in study.spatial_grids))
    print("spatial errors    " + ", ".join(f"{e:.6e}" for e in study.spatial_errors))
    print("spatial orders    " + ", ".join(f"{o:.3f}" for o in study.spatial_orders))
    print("time steps        " + ", ".join(f"{d:g}" for d in study.temporal_steps))
    print("temporal errors   " + ", ".join(f"{e:.6e}" for e in study.temporal_errors))
    print("temporal orders   " + ", ".join(f"{o:.3f}" for o in study.temporal_orders))
    space_ok = 1.7 <= study.spatial_order <= 2.3
    time_ok = 1.8 <= study.temporal_order <= 2.2
    print(f"second order      space {'pass' if space_ok else 'FAIL'}, "
          f"time {'pass' if time_ok else 'FAIL'}")
    return 0 if (space_ok and time_ok) else 2


def _cmd_presets(_args) -> int:
    for name in preset_names():
        print(f"{name:20s} {preset_note(name)}")
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "decay-fit": _cmd_decay_fit,
    "spectrum": _cmd_spectrum,
    "dissipativity": _cmd_dissipativity,
    "convergence": _cmd_convergence,
    "presets": _cmd_presets,
}


def cli_dispatch(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage errors
        return 0 if exc.code == 0 else 1
    if args.command is None:
        parser.print_usage()
        return 1
    try:
        return _HANDLERS[args.command](args)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ThermobeamError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
