import numpy as np
import pytest

from thermobeam import assemble_generator, build_grid, sample_coefficients


def unit_coefficients(grid, kappa=1.0, eta=1.0, analysis_mode=False):
    return sample_coefficients(
        grid, lambda x: np.ones_like(x), lambda x: np.ones_like(x),
        kappa=kappa, eta=eta, analysis_mode=analysis_mode,
    )


def make_operator(n, p_fn=None, q_fn=None, kappa=1.0, eta=1.0, analysis_mode=False):
    grid = build_grid(1.0, n)
    p_fn = p_fn or (lambda x: np.ones_like(x))
    q_fn = q_fn or (lambda x: np.ones_like(x))
    coeffs = sample_coefficients(
        grid, p_fn, q_fn, kappa=kappa, eta=eta, analysis_mode=analysis_mode
    )
    return assemble_generator(grid, coeffs)


@pytest.fixture(scope="session")
def unit_op_64():
    return make_operator(64)


@pytest.fixture(scope="session")
def variable_op_128():
    return make_operator(
        128,
        p_fn=lambda x: 2.0 + np.sin(2.0 * np.pi * x),
        q_fn=lambda x: 1.0 + x,
    )
