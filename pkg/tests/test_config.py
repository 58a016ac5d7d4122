import numpy as np
import pytest

from thermobeam import (
    ConfigError,
    ConfigValidationError,
    InvalidArgumentError,
    build_grid,
    build_initial_state,
    get_preset,
    load_config,
    preset_names,
    resolve_scenario,
)
from thermobeam.config import parse_config_text, with_sigma2


GOOD = """
# scenario for tests
length = 1.0
n_cells = 64
dt = 1e-3
t_end = 1.0
p = sin_bump(2.0, 1.0, 1.0)   # rigidity profile
q = affine(1.0, 1.0)
kappa = 0.5
eta = 2.0
initial_condition = zero_u_gauss_theta(0.2, 1e-2, 0.5)
record_stride = 5
seed = 3
"""


def test_parse_good_config():
    cfg = parse_config_text(GOOD, name="good")
    assert cfg.n_cells == 64
    assert cfg.kappa == 0.5
    assert cfg.eta == 2.0
    assert cfg.record_stride == 5
    assert cfg.epsilon == "auto"  # omitted key falls back to the default
    assert cfg.fit_window == (0.1, 0.8)


def test_unknown_and_duplicate_keys_aggregate():
    text = "length = 1.0\nbogus = 3\nlength = 2.0\nother = x\n"
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config_text(text)
    msg = str(excinfo.value)
    assert "line 2" in msg and "bogus" in msg
    assert "line 3" in msg and "duplicate" in msg
    assert "line 4" in msg and "other" in msg


def test_malformed_line_reports_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("length = 1.0\nnot a key value pair\n")


def test_validation_aggregates_all_problems():
    text = "n_cells = 3\ndt = -1\nkappa = 0\np = mystery(1)\n"
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config_text(text)
    msg = str(excinfo.value)
    assert "n_cells" in msg and "dt" in msg and "kappa" in msg and "mystery" in msg


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.cfg")


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(GOOD)
    cfg = load_config(path)
    assert cfg.name == "scenario"
    assert cfg.p == "sin_bump(2.0, 1.0, 1.0)"


def test_presets_list_and_values():
    assert preset_names() == [
        "fig1_sigma2_1e-4",
        "fig1_sigma2_1e-3",
        "fig1_sigma2_1e-2",
        "zero",
        "manufactured",
    ]
    fig1 = get_preset("fig1_sigma2_1e-2")
    assert fig1.initial_condition == "zero_u_gauss_theta(0.2, 0.01, 0.5)"
    assert (fig1.length, fig1.n_cells, fig1.dt, fig1.t_end) == (1.0, 400, 1e-3, 10.0)
    assert fig1.fit_window == (1.0, 8.0)
    with pytest.raises(ConfigError):
        get_preset("fig2")


def test_resolve_scenario_prefers_presets(tmp_path):
    assert resolve_scenario("zero").name == "zero"
    path = tmp_path / "c.cfg"
    path.write_text("n_cells = 32\n")
    assert resolve_scenario(str(path)).n_cells == 32


def test_gaussian_initial_state_and_clipping():
    cfg = get_preset("fig1_sigma2_1e-2")
    grid = build_grid(cfg.length, cfg.n_cells)
    state = build_initial_state(cfg, grid)
    assert np.all(state.u == 0.0) and np.all(state.v == 0.0)
    x = grid.interior
    assert state.theta.max() == pytest.approx(0.2, rel=1e-3)
    center_idx = np.argmax(state.theta)
    assert x[center_idx] == pytest.approx(0.5, abs=grid.h)
    # boundary values are not stored: interior tails are tiny but nonzero
    assert 0 < state.theta[0] < 1e-10


def test_under_resolved_pulse_warns():
    cfg = with_sigma2(get_preset("fig1_sigma2_1e-2"), 1e-4)
    grid = build_grid(1.0, 50)  # 4h = 0.08 > sigma = 0.01
    with pytest.warns(UserWarning, match="under-resolved"):
        build_initial_state(cfg, grid)


def test_zero_amplitude_pulse_does_not_warn():
    cfg = get_preset("zero")
    grid = build_grid(1.0, 8)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        state = build_initial_state(cfg, grid)
    assert np.all(state.theta == 0.0)


def test_mms_state_initial_condition():
    cfg = get_preset("manufactured")
    grid = build_grid(cfg.length, 64)
    state = build_initial_state(cfg, grid)
    s = np.sin(np.pi * grid.interior)
    assert np.allclose(state.u, s * s)
    assert np.array_equal(state.v, -state.u)
    assert np.allclose(state.theta, s)


def test_custom_samples_initial_condition(tmp_path):
    grid = build_grid(1.0, 8)
    rows = ["x,u,v,theta"]
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((9, 3))
    vals[0] = vals[-1] = 0.0
    for xi, (u, v, th) in zip(grid.nodes, vals):
        rows.append(f"{xi:.12e},{u:.12e},{v:.12e},{th:.12e}")
    path = tmp_path / "ic.csv"
    path.write_text("\n".join(rows) + "\n")
    cfg = resolve_scenario("zero")
    cfg = type(cfg)(name="custom", n_cells=8,
                    initial_condition=f"custom_samples({path})")
    state = build_initial_state(cfg, grid)
    assert np.allclose(state.u, vals[1:-1, 0], atol=1e-11)

    wrong_grid = build_grid(1.0, 16)
    with pytest.raises(InvalidArgumentError):
        build_initial_state(cfg, wrong_grid)


def test_with_sigma2_rewrites_the_pulse():
    cfg = with_sigma2(get_preset("fig1_sigma2_1e-2"), 1e-3)
    assert "0.001" in cfg.initial_condition
    assert cfg.name.endswith("sigma2_0.001")
    with pytest.raises(InvalidArgumentError):
        with_sigma2(get_preset("manufactured"), 1e-3)


def test_bad_initial_condition_specs():
    for bad in (
        "zero_u_gauss_theta(0.2)",
        "zero_u_gauss_theta(0.2, -1e-2)",
        "mms_state(1)",
        "warp_field(9)",
        "custom_samples()",
    ):
        with pytest.raises(ConfigValidationError):
            parse_config_text(f"initial_condition = {bad}\n")
