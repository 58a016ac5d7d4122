"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run with -s to see them inline)."""

import time

import numpy as np
import pytest

from thermobeam import (
    BeamState,
    build_grid,
    build_plan,
    dissipativity_certificate,
    fit_decay,
    get_preset,
    manufactured_convergence,
    norm_h,
    resolve_at_zero,
    run,
    run_scenario,
    sample_coefficients,
    spectral_abscissa,
)
from thermobeam.analysis import random_smooth_state, random_state
from thermobeam.config import build_initial_state
from thermobeam.diagnostics import mu_constant
from thermobeam.grid import coefficient_from_spec
from thermobeam.operators import assemble_generator

from conftest import make_operator

PRESET_NAMES = ("fig1_sigma2_1e-4", "fig1_sigma2_1e-3", "fig1_sigma2_1e-2")


def _report(name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {tag}: {name}" + (f"  [{detail}]" if detail else ""))
    assert ok, f"{name}: {detail}"


def _operator_for(cfg):
    grid = build_grid(cfg.length, cfg.n_cells)
    coeffs = sample_coefficients(
        grid, coefficient_from_spec(cfg.p), coefficient_from_spec(cfg.q),
        kappa=cfg.kappa, eta=cfg.eta,
    )
    return grid, assemble_generator(grid, coeffs)


@pytest.fixture(scope="module")
def preset_runs():
    """One full trajectory per heat-pulse preset, plus the pieces needed to
    rerun with scaled initial data."""
    runs = {}
    for name in PRESET_NAMES:
        cfg = get_preset(name)
        grid, op = _operator_for(cfg)
        plan = build_plan(op, cfg.dt, cfg.t_end, cfg.record_stride)
        state0 = build_initial_state(cfg, grid)
        start = time.perf_counter()
        traj = run(plan, op, state0)
        wall = time.perf_counter() - start
        runs[name] = dict(cfg=cfg, op=op, plan=plan, state0=state0,
                          trajectory=traj, wall=wall)
    return runs


def test_discrete_dissipativity_identity():
    start = time.perf_counter()
    worst = 0.0
    for variable in (False, True):
        for n in (32, 64, 128):
            if variable:
                op = make_operator(
                    n, p_fn=lambda x: 2.0 + np.sin(2.0 * np.pi * x),
                    q_fn=lambda x: 1.0 + x,
                )
            else:
                op = make_operator(n)
            worst = max(worst, dissipativity_certificate(op, 1000, seed=n))
    wall = time.perf_counter() - start
    _report(
        "discrete dissipativity identity (6 operator sets x 1000 states)",
        worst < 1e-10 and wall < 5.0,
        f"max defect {worst:.3e}, {wall:.2f}s",
    )


def test_trajectory_energy_budget(preset_runs):
    entry = preset_runs["fig1_sigma2_1e-2"]
    cfg, traj = entry["cfg"], entry["trajectory"]
    assert (cfg.length, cfg.n_cells, cfg.dt, cfg.t_end) == (1.0, 400, 1e-3, 10.0)
    e0 = traj.records[0].energy
    e_final = traj.records[-1].energy
    defect = abs(e_final - e0 - traj.cumulative_dissipation)
    ok = (
        defect < 1e-9 * e0
        and traj.max_energy_step_increase <= 0.0
        and entry["wall"] < 10.0
    )
    _report(
        "trajectory energy budget on fig1_sigma2_1e-2",
        ok,
        f"defect {defect:.3e} < {1e-9 * e0:.3e}, "
        f"max step increase {traj.max_energy_step_increase:.2e}, "
        f"{entry['wall']:.2f}s",
    )


def test_exponential_decay_fits(preset_runs):
    details = []
    ok = True
    for name in PRESET_NAMES:
        entry = preset_runs[name]
        fit = fit_decay(entry["trajectory"].records, window=(1.0, 8.0))
        s0 = entry["state0"]
        scaled = BeamState(2.0 * s0.u, 2.0 * s0.v, 2.0 * s0.theta)
        traj2 = run(entry["plan"], entry["op"], scaled)
        fit2 = fit_decay(traj2.records, window=(1.0, 8.0))
        drift = abs(fit2.m - fit.m) / fit.m
        ok = ok and fit.m > 0 and fit.residual_rms < 0.2 and drift < 1e-10
        details.append(f"{name}: m={fit.m:.3f} rms={fit.residual_rms:.3f} "
                       f"scale drift={drift:.1e}")
    _report("exponential decay fits with scale-invariant rate", ok,
            "; ".join(details))


def test_lyapunov_sandwich_and_monotonicity(preset_runs):
    ok = True
    details = []
    for name in PRESET_NAMES:
        entry = preset_runs[name]
        op, traj = entry["op"], entry["trajectory"]
        mu = mu_constant(op)
        eps = traj.epsilon
        assert eps == min(0.1, 1.0 / (2.0 * mu))
        sandwich = all(
            (1.0 - eps * mu) * r.energy <= r.lyapunov_g <= (1.0 + eps * mu) * r.energy
            for r in traj.records
        )
        g = np.array([r.lyapunov_g for r in traj.records])
        record_monotone = np.max(np.diff(g)) <= 1e-12
        step_monotone = traj.max_lyapunov_step_increase <= 1e-12
        ok = ok and sandwich and record_monotone and step_monotone
        details.append(f"{name}: max G step increase "
                       f"{traj.max_lyapunov_step_increase:.1e}")
    _report("Lyapunov sandwich and monotone decay", ok, "; ".join(details))


def test_resolvent_at_zero():
    worst_roundtrip = 0.0
    per_grid_max_ratio = []
    for n in (32, 64, 128):
        op = make_operator(n)
        rng = np.random.default_rng(1000 + n)
        for _ in range(100):
            target = random_state(op, rng)
            recovered, _ = resolve_at_zero(op, op.apply(target))
            diff = BeamState(recovered.u - target.u, recovered.v - target.v,
                             recovered.theta - target.theta)
            worst_roundtrip = max(
                worst_roundtrip, norm_h(diff, op) / norm_h(target, op)
            )
        smooth_rng = np.random.default_rng(7)
        ratios = [
            resolve_at_zero(op, random_smooth_state(op, smooth_rng))[1].stability_ratio
            for _ in range(100)
        ]
        per_grid_max_ratio.append(max(ratios))
    variation = max(per_grid_max_ratio) / min(per_grid_max_ratio)
    ok = worst_roundtrip < 1e-9 and variation < 10.0
    _report(
        "resolvent solve at zero (round trip and n-uniform stability)",
        ok,
        f"worst roundtrip {worst_roundtrip:.2e}, ratio variation {variation:.2f}x",
    )


def test_spectral_abscissa():
    damped = spectral_abscissa(make_operator(64), method="dense")
    conservative = make_operator(64, q_fn=lambda x: np.zeros_like(x), kappa=0.0,
                                 analysis_mode=True)
    report = spectral_abscissa(conservative, method="dense")
    beam = report.eigenvalues[np.abs(report.eigenvalues.imag) > 0]
    beam_re = float(np.max(np.abs(beam.real))) if beam.size else 0.0
    ok = damped.abscissa < 0.0 and beam_re < 1e-8
    _report(
        "spectral abscissa (damped negative; conservative beam imaginary)",
        ok,
        f"abscissa {damped.abscissa:.4f}, beam |Re| {beam_re:.1e}",
    )


def test_convergence_orders():
    start = time.perf_counter()
    study = manufactured_convergence(levels=3)
    wall = time.perf_counter() - start
    ok = (
        1.7 <= study.spatial_order <= 2.3
        and 1.8 <= study.temporal_order <= 2.2
        and wall < 60.0
    )
    _report(
        "manufactured-solution convergence orders",
        ok,
        f"space {study.spatial_order:.2f}, time {study.temporal_order:.2f}, "
        f"{wall:.1f}s",
    )


def test_clamped_beam_eigenvalue_oracle():
    # independent oracle: bisection on cos(b) cosh(b) = 1
    f = lambda b: np.cos(b) * np.cosh(b) - 1.0
    lo, hi = 4.0, 5.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    beta1 = 0.5 * (lo + hi)
    lam_exact = beta1**4

    op = make_operator(256, q_fn=lambda x: np.zeros_like(x), kappa=0.0,
                       analysis_mode=True)
    lam = float(np.linalg.eigvalsh(op.bending_op.toarray())[0])
    rel = abs(lam - lam_exact) / lam_exact
    _report(
        "clamped-beam smallest eigenvalue vs characteristic-equation oracle",
        rel < 1e-3,
        f"beta1 {beta1:.6f}, eigenvalue {lam:.3f} vs {lam_exact:.3f}, "
        f"rel err {rel:.2e}",
    )


def test_simulate_determinism(tmp_path):
    cfg = get_preset("fig1_sigma2_1e-2")
    a = run_scenario(cfg, out_dir=tmp_path / "a")
    b = run_scenario(cfg, out_dir=tmp_path / "b")
    same = (
        a.diagnostics_csv.read_bytes() == b.diagnostics_csv.read_bytes()
        and a.final_state_csv.read_bytes() == b.final_state_csv.read_bytes()
    )
    _report("byte-identical repeated simulation", same)
