import math

import numpy as np
import pytest

from ringcav.analysis import (
    DEFAULT_TRANSIENT,
    MIN_TRANSITIONS,
    SweepSpec,
    fit_exponential,
    jump_statistics,
    loglog_slope,
    sweep,
    trajectory_jump_statistics,
)
from ringcav.errors import DegenerateFitError
from ringcav.linear import cooling_summary
from ringcav.moments import MomentState, integrate_moments, steady_state_moments
from ringcav.params import SystemParams, derive_params
from ringcav.quantum import HilbertSpace, build_model, mcwf_trajectory, trap_level_state


def test_fit_synthetic():
    t = np.linspace(0, 200, 201)
    f = fit_exponential(t, 3 * np.exp(-0.05 * t) + 1.5)
    assert f.converged
    assert f.rate == pytest.approx(0.05, abs=1e-6)
    assert f.amplitude == pytest.approx(3.0, abs=1e-6)
    assert f.offset == pytest.approx(1.5, abs=1e-6)
    assert f.residual_norm < 1e-9


@pytest.mark.parametrize("gamma", [1e-4, 1e-3, 1e-2, 1e-1, 1.0])
def test_fit_exact_across_decades(gamma):
    t = np.linspace(0, 8 / gamma, 161)
    f = fit_exponential(t, -2.0 * np.exp(-gamma * t) + 0.7)
    assert f.rate == pytest.approx(gamma, rel=1e-8)


def test_fit_with_time_offset_and_transient():
    t = np.linspace(10, 110, 201)
    y = 4 * np.exp(-0.1 * (t - 10)) + 1
    y[:5] += 100.0  # junk before the transient cut
    f = fit_exponential(t, y, transient=DEFAULT_TRANSIENT)
    assert f.rate == pytest.approx(0.1, rel=1e-8)


def test_fit_degenerate():
    with pytest.raises(DegenerateFitError, match="degenerate"):
        fit_exponential(np.arange(20.0), np.full(20, 3.0))
    with pytest.raises(DegenerateFitError):
        fit_exponential(np.arange(7.0), np.arange(7.0))


def test_fit_reports_residual_on_poor_data(rng):
    t = np.linspace(0, 10, 50)
    f = fit_exponential(t, rng.normal(size=50))
    assert math.isfinite(f.rate) and math.isfinite(f.residual_norm)


def test_fit_moment_decay_matches_linear_rate():
    u0 = 2 * 0.05**2 / 6.0
    p = SystemParams.from_trap_frequency(6.0, -6.0, u0, 0.01)
    gamma = cooling_summary(p).gamma_cool
    s = integrate_moments(MomentState.thermal(10.0), p, 5 / gamma, tol=1e-8, n_samples=401)
    f = fit_exponential(s.t, s.n_at, DEFAULT_TRANSIENT)
    assert f.rate == pytest.approx(gamma, rel=0.1)


BASE = SystemParams(kappa=1.0, delta=-2.0, u0=0.01, eta=10.0, omega_rec=0.01)


def test_sweep_fixed_detuning_minimum():
    grid = 2.0 * 10 ** (np.arange(-5, 6) / 5)
    for u0 in (0.01, 0.05, 0.1):
        t = sweep(SweepSpec(BASE.replace(u0=u0), "omega_m", grid, ("n_at_moments", "eta")))
        k = int(np.argmin(t.columns["n_at_moments"]))
        assert t.columns["omega_m"][k] == pytest.approx(2.0)


def test_sweep_eta_axis_consistent_with_omega_axis():
    grid = np.geomspace(5, 50, 5)
    t = sweep(SweepSpec(BASE, "eta", grid, ("omega_m", "n_at_linear")))
    for eta, wm, n in zip(grid, t.columns["omega_m"], t.columns["n_at_linear"]):
        p = BASE.replace(eta=eta)
        assert wm == derive_params(p).omega_m
        assert n == cooling_summary(p).n_at


def test_sweep_scaling_laws():
    base = SystemParams(u0=0.01, omega_rec=0.01)
    lo = sweep(SweepSpec(base, "omega_m", np.geomspace(0.01, 0.1, 11), ("eta", "gamma_linear"),
                         optimal_detuning=True))
    hi = sweep(SweepSpec(base, "omega_m", np.geomspace(10, 100, 11), ("eta", "gamma_linear"),
                         optimal_detuning=True))
    assert loglog_slope(lo.columns["eta"], lo.columns["gamma_linear"]) == pytest.approx(3.0, abs=0.3)
    assert loglog_slope(hi.columns["eta"], hi.columns["gamma_linear"]) == pytest.approx(0.5, abs=0.05)


def test_sweep_optimal_mode_on_eta_axis():
    t = sweep(SweepSpec(SystemParams(), "eta", [10.0, 100.0], ("delta", "omega_m"),
                        optimal_detuning=True))
    assert np.allclose(t.columns["delta"], -t.columns["omega_m"], rtol=1e-12)


def test_single_point_sweep_equals_direct():
    t = sweep(SweepSpec(BASE, "eta", [12.0], ("n_at_linear", "n_at_moments", "gamma_linear")))
    p = BASE.replace(eta=12.0)
    assert t.columns["n_at_linear"][0] == cooling_summary(p).n_at
    m = steady_state_moments(p)
    assert t.columns["n_at_moments"][0] == 0.5 * (m.q2 + m.p2) - 0.5
    assert t.columns["gamma_linear"][0] == cooling_summary(p).gamma_cool


def test_sweep_errors_recorded_per_cell():
    t = sweep(SweepSpec(BASE, "delta", [-2.0, -1.0, 0.5], ("n_at_linear", "alpha")))
    assert math.isnan(t.columns["n_at_linear"][2])
    assert math.isfinite(t.columns["alpha"][2])
    assert t.errors and t.errors[0]["row"] == 2 and t.errors[0]["column"] == "n_at_linear"


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep(SweepSpec(BASE, "eta", [3.0, 2.0, 5.0], ("alpha",)))
    with pytest.raises(ValueError):
        sweep(SweepSpec(BASE, "mass", [1.0], ("alpha",)))
    with pytest.raises(ValueError):
        sweep(SweepSpec(BASE, "eta", [1.0], ("temperature",)))


def test_sweep_provenance_and_series():
    t = sweep(SweepSpec(BASE, "eta", [5.0, 10.0], ("alpha", "n_at_linear", "n_a_moments"),
                        series_name="u0", series_values=(0.01, 0.1)))
    assert t.provenance == {"eta": "input", "u0": "input", "alpha": "params",
                            "n_at_linear": "linear", "n_a_moments": "moments"}
    assert t.columns["u0"].tolist() == [0.01, 0.01, 0.1, 0.1]
    names, rows = t.to_rows()
    assert names[:2] == ["u0", "eta"] and len(rows) == 4


def test_sweep_quantum_cells_reproducible():
    from ringcav.analysis import QuantumSweepSettings
    q = QuantumSweepSettings(n_mom=6, n_fock_sine=2, n_traj=4, t_max=10.0, n_samples=11,
                             initial_e_kin=4.0, average_window=5.0, master_seed=3)
    base = SystemParams.from_trap_frequency(3.0, -3.0, 0.3, 0.25)
    spec = dict(base=base, axis="delta", grid=[-4.0, -3.0], quantities=("e_kin_mcwf", "n_sine_mcwf"))
    a = sweep(SweepSpec(quantum=q, **spec))
    b = sweep(SweepSpec(quantum=QuantumSweepSettings(**{**q.__dict__, "workers": 3}), **spec))
    assert a.provenance["e_kin_mcwf"] == "quantum"
    for k in a.columns:
        assert np.array_equal(a.columns[k], b.columns[k])


def telegraph(rate01, rate10, n, dt, seed):
    r = np.random.default_rng(seed)
    x = np.zeros(n)
    state = 0
    for i in range(n):
        x[i] = state
        rate = rate01 if state == 0 else rate10
        if r.random() < rate * dt:
            state = 1 - state
    return np.arange(n) * dt, x


def test_telegraph_dwell_means():
    t, x = telegraph(0.02, 0.05, 400_000, 0.1, 1)
    js = jump_statistics(t, x)
    assert np.mean(js.dwell_times[0]) == pytest.approx(1 / 0.02, rel=0.1)
    assert np.mean(js.dwell_times[1]) == pytest.approx(1 / 0.05, rel=0.1)
    assert abs(js.transitions["0->1"] - js.transitions["1->0"]) <= 1
    assert not js.low_confidence
    assert all(d > 0 for v in js.dwell_times.values() for d in v)


def test_constant_zero_occupancy():
    t = np.arange(100.0)
    js = jump_statistics(t, np.zeros(100), np.zeros(100))
    assert js.n_transitions == 0 and js.dwell_times[1] == []
    assert js.low_confidence
    assert math.isnan(js.correlation)


def test_min_dwell_suppresses_flicker():
    t = np.arange(20.0)
    x = np.zeros(20)
    x[5] = 1.0
    x[10:] = 1.0
    assert jump_statistics(t, x).n_transitions == 3
    assert jump_statistics(t, x, min_dwell=2).n_transitions == 1


def test_low_confidence_threshold():
    t = np.arange(100.0)
    x = (np.arange(100) // 10) % 2 == 1
    js = jump_statistics(t, x.astype(float))
    assert js.n_transitions == 9 and js.n_transitions >= MIN_TRANSITIONS
    assert not js.low_confidence


def test_quantum_jump_trajectory_correlation():
    p = SystemParams.from_trap_frequency(6.0, -2.0, 0.01, 0.25)
    m = build_model(p, HilbertSpace(n_mom=16, n_fock_sine=4))
    rec = mcwf_trajectory(m, trap_level_state(m, 0), 7, 2000.0, 4001)
    js = trajectory_jump_statistics(rec)
    assert js.n_photon_jumps == len(rec.jumps)
    assert js.correlation > 0
