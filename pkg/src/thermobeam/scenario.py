"""Scenario orchestration: grid -> coefficients -> operators -> plan ->
trajectory -> diagnostics -> CSV emission."""

from __future__ import annotations

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import analysis
from .config import ScenarioConfig, build_initial_state, with_sigma2
from .diagnostics import DecayFit, DiagnosticsRecord, default_epsilon, fit_decay, mu_constant
from .errors import DegenerateFitError, InsufficientDataError
from .grid import build_grid, coefficient_from_spec, sample_coefficients
from .operators import assemble_generator
from .timestepper import Trajectory, build_plan, run

__all__ = ["RunSummary", "RunOutput", "run_scenario", "run_sweep", "resolve_out_dir",
           "format_summary", "write_csv_atomic"]

OUT_DIR_ENV = "THERMOBEAM_OUT"

FINAL_STATE_HEADER = "x,u,v,theta"


@dataclass(frozen=True)
class RunSummary:
    name: str
    energy_initial: float
    energy_final: float
    max_balance_residual: float
    max_energy_step_increase: float
    epsilon: float
    mu: float
    fit: Optional[DecayFit]
    fit_note: str
    abscissa: Optional[float] = None


@dataclass(frozen=True)
class RunOutput:
    diagnostics_csv: Path
    final_state_csv: Path
    summary: RunSummary
    trajectory: Trajectory


def resolve_out_dir(out_dir=None) -> Path:
    path = Path(out_dir or os.environ.get(OUT_DIR_ENV) or "out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv_atomic(path: Path, header: str, rows) -> None:
    """Write header + rows to path via a temp file and rename, so an
    interrupted run never leaves a partial file at the target."""
    path = Path(path)
    text = header + "\n" + "\n".join(rows) + "\n"
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _final_state_rows(grid, state):
    u = np.concatenate(([0.0], state.u, [0.0]))
    v = np.concatenate(([0.0], state.v, [0.0]))
    theta = np.concatenate(([0.0], state.theta, [0.0]))
    for xi, ui, vi, ti in zip(grid.nodes, u, v, theta):
        yield f"{xi:.12e},{ui:.12e},{vi:.12e},{ti:.12e}"


def run_scenario(
    cfg: ScenarioConfig,
    out_dir=None,
    include_abscissa: bool = False,
) -> RunOutput:
    """Execute one scenario and emit its diagnostics and final-state CSVs."""
    out = resolve_out_dir(out_dir)

    grid = build_grid(cfg.length, cfg.n_cells)
    coeffs = sample_coefficients(
        grid,
        coefficient_from_spec(cfg.p),
        coefficient_from_spec(cfg.q),
        kappa=cfg.kappa,
        eta=cfg.eta,
    )
    op = assemble_generator(grid, coeffs)
    epsilon = default_epsilon(op) if cfg.epsilon == "auto" else float(cfg.epsilon)
    state0 = build_initial_state(cfg, grid)
    plan = build_plan(op, cfg.dt, cfg.t_end, cfg.record_stride)
    trajectory = run(plan, op, state0, epsilon=epsilon)

    fit = None
    fit_note = "ok"
    try:
        fit = fit_decay(trajectory.records, cfg.fit_window)
    except DegenerateFitError as exc:
        fit_note = f"degenerate fit: {exc}"
    except InsufficientDataError as exc:
        fit_note = f"insufficient data: {exc}"

    abscissa = None
    if include_abscissa:
        abscissa = analysis.spectral_abscissa(op, method="dense").abscissa

    diag_path = out / f"{cfg.name}_diagnostics.csv"
    state_path = out / f"{cfg.name}_final_state.csv"
    write_csv_atomic(
        diag_path,
        DiagnosticsRecord.CSV_HEADER,
        (r.csv_row() for r in trajectory.records),
    )
    write_csv_atomic(
        state_path, FINAL_STATE_HEADER, _final_state_rows(grid, trajectory.states[-1])
    )

    summary = RunSummary(
        name=cfg.name,
        energy_initial=trajectory.records[0].energy,
        energy_final=trajectory.records[-1].energy,
        max_balance_residual=max(abs(r.balance_residual) for r in trajectory.records),
        max_energy_step_increase=trajectory.max_energy_step_increase,
        epsilon=epsilon,
        mu=mu_constant(op),
        fit=fit,
        fit_note=fit_note,
        abscissa=abscissa,
    )
    return RunOutput(
        diagnostics_csv=diag_path,
        final_state_csv=state_path,
        summary=summary,
        trajectory=trajectory,
    )


def run_sweep(
    cfg: ScenarioConfig,
    sigma2_values: Sequence[float],
    out_dir=None,
    include_abscissa: bool = False,
) -> List[RunOutput]:
    """Run independent simulations over heat-pulse widths concurrently; each
    writes to its own files."""
    configs = [with_sigma2(cfg, s2) for s2 in sigma2_values]
    out = resolve_out_dir(out_dir)
    with ThreadPoolExecutor(max_workers=len(configs)) as pool:
        futures = [
            pool.submit(run_scenario, c, out, include_abscissa) for c in configs
        ]
        return [f.result() for f in futures]


def format_summary(output: RunOutput) -> str:
    s = output.summary
    lines = [
        f"scenario          {s.name}",
        f"diagnostics csv   {output.diagnostics_csv}",
        f"final state csv   {output.final_state_csv}",
        f"initial energy    {s.energy_initial:.12e}",
        f"final energy      {s.energy_final:.12e}",
        f"max balance def.  {s.max_balance_residual:.3e}",
        f"max energy step+  {s.max_energy_step_increase:.3e}",
        f"epsilon / mu      {s.epsilon:.6g} / {s.mu:.6g}",
    ]
    if s.fit is not None:
        lines += [
            f"decay rate m      {s.fit.m:.6g}",
            f"prefactor M       {s.fit.M:.6g}",
            f"fit residual rms  {s.fit.residual_rms:.4g} "
            f"(window [{s.fit.fit_window[0]:g}, {s.fit.fit_window[1]:g}], "
            f"{s.fit.n_points} points)",
        ]
    else:
        lines.append(f"decay fit         {s.fit_note}")
    if s.abscissa is not None:
        lines.append(f"spectral abscissa {s.abscissa:.6g}")
    return "\n".join(lines)
