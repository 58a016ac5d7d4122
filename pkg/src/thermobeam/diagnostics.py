"""Scalar diagnostics: energy, dissipation, perturbed-energy functionals,
and exponential decay-rate fitting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateFitError, InsufficientDataError, InvalidArgumentError
from .operators import BeamState, BlockOperator

__all__ = [
    "DiagnosticsRecord",
    "DecayFit",
    "energy",
    "dissipation",
    "f1",
    "mu_constant",
    "lyapunov_g",
    "default_epsilon",
    "fit_decay",
    "ENERGY_FLOOR_FACTOR",
]

# Records with energy below this multiple of the initial energy sit in the
# rounding floor of the quadratic form and are excluded from decay fits.
ENERGY_FLOOR_FACTOR = 1e-14


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-record scalars along a trajectory.

    balance_residual is the defect of the discrete energy identity over
    the record window: E(t_k) - E(t_{k-1}) - dt * sum of midpoint
    dissipation of the intervening steps.
    """

    t: float
    energy: float
    dissipation: float
    balance_residual: float
    f1: float
    lyapunov_g: float

    CSV_HEADER = "t,energy,dissipation,balance_residual,f1,lyapunov_g"

    def csv_row(self) -> str:
        vals = (self.t, self.energy, self.dissipation, self.balance_residual,
                self.f1, self.lyapunov_g)
        return ",".join(f"{v:.12e}" for v in vals)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of E(t) ~ M * E(0) * exp(-m t) on a window."""

    m: float
    M: float
    fit_window: Tuple[float, float]
    residual_rms: float
    n_points: int


def energy(state: BeamState, op: BlockOperator) -> float:
    """Total energy: half the p-weighted bending form plus the kinetic and
    thermal L2 terms. Nonnegative by construction (sums of squares)."""
    op._check(state)
    gu = op.second_derivative_map @ state.u
    h = op.grid.h
    return 0.5 * float(
        np.dot(op._wp, gu * gu)
        + h * np.dot(state.v, state.v)
        + h * np.dot(state.theta, state.theta)
    )


def dissipation(state: BeamState, op: BlockOperator) -> float:
    """Instantaneous energy derivative: -2 * sum(w q v^2) - eta * S(theta),
    where S is the edge sum of squared first differences of theta
    (boundary values zero). Always <= 0."""
    op._check(state)
    h = op.grid.h
    v = state.v
    damping = h * float(np.dot(op.q_interior * v, v))
    th = state.theta
    d = np.empty(th.size + 1)
    d[0] = th[0]
    d[1:-1] = th[1:] - th[:-1]
    d[-1] = -th[-1]
    grad_sq = float(np.dot(d, d)) / h
    return -2.0 * damping - op.eta * grad_sq


def f1(state: BeamState, op: BlockOperator) -> float:
    """Auxiliary functional sum(w u v) + sum(w q u^2)."""
    op._check(state)
    h = op.grid.h
    u, v = state.u, state.v
    return h * float(np.dot(u, v) + np.dot(op.q_interior * u, u))


def mu_constant(op: BlockOperator) -> float:
    """Equivalence constant mu with |f1| <= mu * energy.

    Built from Young's inequality and the interval Poincare constant
    applied twice (u and u_x both vanish at the ends):
    mu = 1/2 + (1/2 + alpha4) * Cp^2 / alpha1 with Cp = (L/pi)^2. The
    continuum Cp is used on purpose: it is grid independent and an upper
    bound for the discrete constant.
    """
    cp = (op.grid.length / np.pi) ** 2
    return 0.5 + (0.5 + op.coeffs.alpha4) * cp * cp / op.coeffs.alpha1


def default_epsilon(op: BlockOperator) -> float:
    """Perturbation weight for the Lyapunov diagnostic; always satisfies
    epsilon * mu < 1 so the energy sandwich holds."""
    return min(0.1, 1.0 / (2.0 * mu_constant(op)))


def lyapunov_g(state: BeamState, op: BlockOperator, epsilon: float) -> float:
    """Perturbed energy G = E + epsilon * f1; for epsilon * mu < 1 it is
    equivalent to E and decays monotonically along trajectories."""
    if not epsilon > 0:
        raise InvalidArgumentError(f"epsilon must be > 0 (got {epsilon})")
    return energy(state, op) + epsilon * f1(state, op)


def fit_decay(
    records: Sequence[DiagnosticsRecord],
    window: Optional[Tuple[float, float]] = None,
) -> DecayFit:
    """Fit ln E(t) = ln(M E(0)) - m t by least squares on a time window.

    window=None selects [t_end/10, 4 t_end/5]. Records whose energy sits
    below ENERGY_FLOOR_FACTOR * E(0) are excluded before fitting.
    """
    if not records:
        raise InsufficientDataError("no records to fit")
    t_last = records[-1].t
    if window is None:
        window = (t_last / 10.0, 0.8 * t_last)
    t0, t1 = window
    e0 = records[0].energy

    in_window = [r for r in records if t0 <= r.t <= t1]
    if any(r.energy == 0.0 for r in in_window):
        raise DegenerateFitError(
            "zero energy inside the fit window; shrink the window or skip the fit"
        )
    usable = [r for r in in_window if r.energy > ENERGY_FLOOR_FACTOR * e0]
    if len(usable) < 10:
        raise InsufficientDataError(
            f"need >= 10 usable records in window [{t0:g}, {t1:g}], got {len(usable)}"
        )

    ts = np.array([r.t for r in usable])
    ys = np.log([r.energy for r in usable])
    design = np.vstack([ts, np.ones_like(ts)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, ys, rcond=None)
    residuals = ys - design @ np.array([slope, intercept])
    return DecayFit(
        m=float(-slope),
        M=float(np.exp(intercept) / e0),
        fit_window=(float(t0), float(t1)),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        n_points=len(usable),
    )
