import numpy as np
import pytest
from scipy.integrate import quad

from thermobeam import (
    BeamState,
    DegenerateFitError,
    InsufficientDataError,
    InvalidArgumentError,
    build_grid,
    inner_product,
)
from thermobeam.diagnostics import (
    DiagnosticsRecord,
    default_epsilon,
    dissipation,
    energy,
    f1,
    fit_decay,
    lyapunov_g,
    mu_constant,
)
from thermobeam.operators import zero_state

from conftest import make_operator


def random_state(op, rng):
    m = op.n_interior
    return BeamState(rng.standard_normal(m), rng.standard_normal(m), rng.standard_normal(m))


def synthetic_records(ts, es):
    return [
        DiagnosticsRecord(t=float(t), energy=float(e), dissipation=0.0,
                          balance_residual=0.0, f1=0.0, lyapunov_g=float(e))
        for t, e in zip(ts, es)
    ]


# --- energy -------------------------------------------------------------------


def test_energy_zero_state(unit_op_64):
    assert energy(zero_state(unit_op_64.grid), unit_op_64) == 0.0


def test_energy_of_heat_pulse_matches_quadrature_oracle():
    amp, sigma2, center = 0.2, 1e-2, 0.5
    op = make_operator(400)
    x = op.grid.interior
    theta = amp * np.exp(-((x - center) ** 2) / sigma2)
    state = BeamState(np.zeros_like(x), np.zeros_like(x), theta)
    # independent oracle: adaptive quadrature of the continuum integrand
    integral, err = quad(lambda s: (amp * np.exp(-((s - center) ** 2) / sigma2)) ** 2,
                         0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    assert err < 1e-12
    expected = 0.5 * integral
    # closed form half * A^2 * sigma * sqrt(pi/2), tails < 1e-12
    closed = 0.5 * amp**2 * np.sqrt(sigma2) * np.sqrt(np.pi / 2.0)
    assert expected == pytest.approx(2.5066e-3, rel=1e-4)
    assert closed == pytest.approx(expected, rel=1e-10)
    assert energy(state, op) == pytest.approx(expected, rel=1e-6)


def test_energy_is_half_the_inner_product(unit_op_64):
    rng = np.random.default_rng(23)
    for _ in range(20):
        state = random_state(unit_op_64, rng)
        e = energy(state, unit_op_64)
        ip = inner_product(state, state, unit_op_64)
        assert abs(ip - 2.0 * e) <= 1e-13 * max(ip, 1.0)


# --- dissipation ----------------------------------------------------------------


def test_dissipation_zero_cases(unit_op_64):
    assert dissipation(zero_state(unit_op_64.grid), unit_op_64) == 0.0
    m = unit_op_64.n_interior
    bending_only = BeamState(np.random.default_rng(0).standard_normal(m),
                             np.zeros(m), np.zeros(m))
    assert dissipation(bending_only, unit_op_64) == 0.0


def test_dissipation_matches_generator_pairing(variable_op_128):
    rng = np.random.default_rng(29)
    for _ in range(50):
        state = random_state(variable_op_128, rng)
        lhs = inner_product(variable_op_128.apply(state), state, variable_op_128)
        rhs = dissipation(state, variable_op_128)
        scale = max(inner_product(state, state, variable_op_128), 1.0)
        assert abs(lhs - rhs) <= 1e-11 * scale
        assert rhs <= 0.0


# --- f1 and constants -----------------------------------------------------------


def test_f1_zero_and_cancellation(unit_op_64):
    assert f1(zero_state(unit_op_64.grid), unit_op_64) == 0.0
    rng = np.random.default_rng(31)
    m = unit_op_64.n_interior
    u = rng.standard_normal(m)
    v = -(unit_op_64.q_interior * u)
    state = BeamState(u, v, np.zeros(m))
    assert abs(f1(state, unit_op_64)) <= 1e-15


def test_mu_constant_value_and_scaling(unit_op_64):
    mu = mu_constant(unit_op_64)
    cp2 = (1.0 / np.pi) ** 4
    assert mu == pytest.approx(0.5 + 1.5 * cp2, rel=1e-12)
    assert mu == pytest.approx(0.5154, abs=1e-4)
    # doubling alpha4 raises mu by cp^2 * delta / alpha1
    op2 = make_operator(64, q_fn=lambda x: 2.0 * np.ones_like(x))
    assert mu_constant(op2) - mu == pytest.approx(cp2 * 1.0 / 1.0, rel=1e-12)


def test_f1_bounded_by_mu_energy(variable_op_128):
    mu = mu_constant(variable_op_128)
    rng = np.random.default_rng(37)
    for _ in range(1000):
        state = random_state(variable_op_128, rng)
        assert abs(f1(state, variable_op_128)) <= mu * energy(state, variable_op_128)


# --- Lyapunov -------------------------------------------------------------------


def test_lyapunov_g_validation_and_zero(unit_op_64):
    with pytest.raises(InvalidArgumentError):
        lyapunov_g(zero_state(unit_op_64.grid), unit_op_64, epsilon=0.0)
    with pytest.raises(InvalidArgumentError):
        lyapunov_g(zero_state(unit_op_64.grid), unit_op_64, epsilon=-0.1)
    assert lyapunov_g(zero_state(unit_op_64.grid), unit_op_64, epsilon=0.1) == 0.0


def test_lyapunov_sandwich_random_states(unit_op_64):
    eps = default_epsilon(unit_op_64)
    mu = mu_constant(unit_op_64)
    assert eps * mu < 1.0
    rng = np.random.default_rng(41)
    for _ in range(200):
        state = random_state(unit_op_64, rng)
        e = energy(state, unit_op_64)
        g = lyapunov_g(state, unit_op_64, eps)
        assert (1.0 - eps * mu) * e <= g <= (1.0 + eps * mu) * e


# --- decay fitting ----------------------------------------------------------------


def test_fit_decay_exact_exponential():
    ts = np.linspace(0.0, 5.0, 200)
    fit = fit_decay(synthetic_records(ts, 5.0 * np.exp(-2.0 * ts)), window=(0.5, 4.0))
    assert abs(fit.m - 2.0) < 1e-12
    assert abs(fit.M * 5.0 - 5.0) < 1e-12  # M normalized by E(0) = 5


def test_fit_decay_oscillatory_modulation():
    ts = np.linspace(0.0, 10.0, 400)
    fit = fit_decay(synthetic_records(ts, np.exp(-ts) * (2.0 + np.cos(ts))),
                    window=(1.0, 9.0))
    assert 0.8 <= fit.m <= 1.2
    assert fit.residual_rms > 0.0


def test_fit_decay_default_window():
    ts = np.linspace(0.0, 10.0, 300)
    fit = fit_decay(synthetic_records(ts, np.exp(-ts)))
    assert fit.fit_window == (1.0, 8.0)


def test_fit_decay_errors():
    ts = np.linspace(0.0, 5.0, 100)
    es = np.exp(-ts)
    es[50] = 0.0
    with pytest.raises(DegenerateFitError):
        fit_decay(synthetic_records(ts, es), window=(0.0, 5.0))
    with pytest.raises(InsufficientDataError):
        fit_decay(synthetic_records(ts[:5], np.exp(-ts[:5])), window=(0.0, 5.0))
    with pytest.raises(InsufficientDataError):
        fit_decay([], window=(0.0, 1.0))


def test_fit_decay_excludes_energy_floor():
    ts = np.linspace(0.0, 10.0, 100)
    es = np.exp(-2.0 * ts)
    es[60:] = 1e-20  # below 1e-14 * E(0); would wreck the fit if included
    fit = fit_decay(synthetic_records(ts, es), window=(0.5, 10.0))
    assert fit.n_points == sum(1 for t, e in zip(ts, es) if 0.5 <= t <= 10.0 and e > 1e-14)
    assert abs(fit.m - 2.0) < 1e-10
