import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringcav.errors import NoSteadyStateError
from ringcav.linear import cooling_summary
from ringcav.moments import (
    FIELDS,
    MomentState,
    closed_form_moments,
    integrate_moments,
    moment_decay_rate,
    moment_rhs,
    moment_system,
    occupancy_from_moments,
    steady_state_moments,
    system_for,
)
from ringcav.params import SystemParams, derive_params


def params_for(u0_bar, wm=6.0, delta=None, wr=0.01):
    """Parameters with given trap frequency and effective coupling."""
    u0 = 2 * u0_bar**2 / wm
    return SystemParams.from_trap_frequency(wm, -wm if delta is None else delta, u0, wr)


def vacuum():
    return MomentState.from_vector([0, 0.5, 0.5, 0, 0, 0, 0, 0, 0, 0])


def test_vector_round_trip(rng):
    v = rng.normal(size=10)
    assert np.array_equal(MomentState.from_vector(v).to_vector(), v)
    assert len(FIELDS) == 10


def test_vacuum_fixed_point_uncoupled():
    M, b = moment_system(6.0, 0.0, 1.0, -6.0)
    assert np.all(M @ vacuum().to_vector() + b == 0)


def test_uncoupled_blocks(rng):
    M, b = moment_system(6.0, 0.0, 1.0, -6.0)
    assert np.all(b == 0)
    # field-only moments decay at 2 kappa
    assert M[0, 0] == -2.0
    assert np.allclose(np.linalg.eigvals(M[8:, 8:]).real, -2.0)
    # motional block is purely oscillatory at 2 omega_m
    ev = np.linalg.eigvals(M[1:4, 1:4])
    assert np.allclose(ev.real, 0.0)
    assert np.allclose(np.sort(np.abs(ev.imag)), [0.0, 12.0, 12.0])


def test_rhs_matches_finite_difference(rng):
    p = params_for(0.05)
    m0 = MomentState.from_vector(rng.normal(size=10))
    h = 1e-4
    s = integrate_moments(m0, p, h, tol=1e-13, t_eval=[0.0, h / 2, h])
    # Richardson-extrapolated forward difference, error O(h**2)
    fd = 2 * (s.x[1] - s.x[0]) / (h / 2) - (s.x[2] - s.x[0]) / h
    assert np.allclose(fd, moment_rhs(m0, p).to_vector(), atol=1e-6 * max(1, np.abs(fd).max()))


def test_steady_state_example():
    p = params_for(1e-3)
    m = steady_state_moments(p)
    assert m.q2 == pytest.approx(0.5 + 1 / 144, abs=1e-6)
    assert m.n_a == pytest.approx(1e-6 / (4 * 6 * 6), rel=1e-3)
    assert occupancy_from_moments(m) == pytest.approx(1 / 144, abs=1e-6)


def test_closed_forms_agree_with_solve():
    for ub, wm, d in [(1e-3, 6, -6), (0.05, 6, -6), (0.3, 2, -1), (0.1, 0.5, -3)]:
        p = params_for(ub, wm, d)
        m = steady_state_moments(p)
        na, q2, p2 = closed_form_moments(wm, derive_params(p).u0_bar, 1.0, d)
        assert m.n_a == pytest.approx(na, rel=1e-10)
        assert m.q2 == pytest.approx(q2, rel=1e-10)
        assert m.p2 == pytest.approx(p2, rel=1e-10)


def random_params(seed):
    r = np.random.default_rng(seed)
    wm = 10 ** r.uniform(-1, 1.3)
    ub = 10 ** r.uniform(-3, -0.7) * min(1.0, math.sqrt(wm))
    d = -(10 ** r.uniform(-0.5, 1.3))
    return params_for(ub, wm, d)


@settings(max_examples=40)
@given(seed=st.integers(0, 2**32 - 1))
def test_steady_state_residual_and_imbalance(seed):
    p = random_params(seed)
    try:
        m = steady_state_moments(p)
    except NoSteadyStateError:
        return
    M, b = system_for(p)
    x = m.to_vector()
    assert np.max(np.abs(M @ x + b)) <= 1e-12 * max(1.0, np.max(np.abs(x)))
    d = derive_params(p)
    # exact up to rounding of the operands of q2 - p2
    scale = d.omega_m / (2 * abs(p.delta))
    ulp = np.spacing(max(m.q2, m.p2))
    assert abs(m.n_a + (d.omega_m / (2 * p.delta)) * (m.q2 - m.p2)) <= 64 * scale * ulp
    # physical steady state
    assert m.q2 > 0 and m.p2 > 0 and m.n_a >= 0
    assert m.q2 * m.p2 - (m.acorr / 2) ** 2 >= 0.25 - 1e-12


def test_heating_side_rejected():
    with pytest.raises(NoSteadyStateError):
        steady_state_moments(params_for(0.05, delta=1.0))


def test_occupancy_examples():
    assert occupancy_from_moments(vacuum()) == 0.0
    m = MomentState.from_vector([0, 1.5, 1.5, 0, 0, 0, 0, 0, 0, 0])
    assert occupancy_from_moments(m) == 1.0


def test_convergence_to_steady_state():
    p = params_for(0.05)
    gamma = cooling_summary(p).gamma_cool
    s = integrate_moments(MomentState.thermal(5.0), p, 20 / gamma, n_samples=3)
    ss = steady_state_moments(p).to_vector()
    assert np.allclose(s.x[-1], ss, rtol=1e-6, atol=1e-6 * np.abs(ss).max())


def test_hot_state_relaxes():
    p = params_for(0.2)
    m0 = MomentState.from_vector([0, 50, 50, 0, 0, 0, 0, 0, 0, 0])
    gamma = cooling_summary(p).gamma_cool
    s = integrate_moments(m0, p, 10 / gamma, tol=1e-8, n_samples=2001)
    n = s.n_at
    period = 20
    env = np.array([n[i:i + period].max() for i in range(0, len(n) - period, period)])
    assert np.all(np.diff(env) < 0)
    assert n[-1] < 1.0


def test_free_field_decay():
    m0 = MomentState.from_vector([2.0, 0.5, 0.5, 0, 0, 0, 0, 0, 0, 0])
    M, b = moment_system(6.0, 0.0, 1.0, -6.0)
    from scipy.integrate import solve_ivp
    t = np.linspace(0, 3, 7)
    sol = solve_ivp(lambda _, x: M @ x + b, (0, 3), m0.to_vector(), t_eval=t,
                    method="DOP853", rtol=1e-12, atol=1e-14)
    assert np.allclose(sol.y[0], 2 * np.exp(-2 * t), rtol=1e-9)


def test_decay_rate_matches_linear_weak_coupling():
    p = params_for(0.01)
    assert moment_decay_rate(p) == pytest.approx(cooling_summary(p).gamma_cool, rel=0.02)
