"""Second-moment equations of the linearized sine-mode/oscillator system.

The seven moment equations close on themselves and form a real affine system
``dx/dt = M x + b`` in ten variables.  The packing order of ``x`` is fixed::

    0 n_a      <a^dag a>
    1 q2       <Q^2>
    2 p2       <P^2>
    3 acorr    <QP + PQ>
    4,5        Re, Im <a Q>
    6,7        Re, Im <a P>
    8,9        Re, Im <a^2>
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, NoSteadyStateError
from .params import SystemParams, derive_params

FIELDS = ("n_a", "q2", "p2", "acorr", "re_aq", "im_aq", "re_ap", "im_ap", "re_a2", "im_a2")


@dataclass(frozen=True)
class MomentState:
    n_a: float = 0.0
    q2: float = 0.5
    p2: float = 0.5
    acorr: float = 0.0
    aq: complex = 0j
    ap: complex = 0j
    a2: complex = 0j

    def to_vector(self) -> np.ndarray:
        return np.array([
            self.n_a, self.q2, self.p2, self.acorr,
            self.aq.real, self.aq.imag, self.ap.real, self.ap.imag,
            self.a2.real, self.a2.imag,
        ])

    @classmethod
    def from_vector(cls, v) -> "MomentState":
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]), float(v[3]),
                   complex(v[4], v[5]), complex(v[6], v[7]), complex(v[8], v[9]))

    @classmethod
    def thermal(cls, n_at: float) -> "MomentState":
        """Oscillator in a thermal state with ``n_at`` phonons, sine mode in vacuum."""
        return cls(q2=n_at + 0.5, p2=n_at + 0.5)


def _put(M, row, col, c: complex):
    """Add ``c * z_col`` to ``dz_row/dt`` for complex slots (row, col are Re indices)."""
    M[row, col] += c.real
    M[row, col + 1] -= c.imag
    M[row + 1, col] += c.imag
    M[row + 1, col + 1] += c.real


def moment_system(omega_m: float, u0_bar: float, kappa: float, delta: float):
    """Return ``(M, b)`` for the affine moment system."""
    w, u, k = omega_m, u0_bar, kappa
    M = np.zeros((10, 10))
    b = np.zeros(10)
    # d n_a = -2k n_a + 2u Im<aQ>
    M[0, 0] = -2.0 * k
    M[0, 5] = 2.0 * u
    # d q2 = w A
    M[1, 3] = w
    # d p2 = -w A + 4u Re<aP>
    M[2, 3] = -w
    M[2, 6] = 4.0 * u
    # d A = 2w (p2 - q2) + 4u Re<aQ>
    M[3, 2] = 2.0 * w
    M[3, 1] = -2.0 * w
    M[3, 4] = 4.0 * u
    # d<aQ> = w <aP> - (k - i delta) <aQ> + i u q2
    _put(M, 4, 6, complex(w))
    _put(M, 4, 4, complex(-k, delta))
    M[5, 1] += u
    # d<aP> = (-k + i delta) <aP> - w <aQ> + u (n_a + 1/2 + <a^2> + i A / 2)
    _put(M, 6, 6, complex(-k, delta))
    _put(M, 6, 4, complex(-w))
    _put(M, 6, 8, complex(u))
    M[6, 0] += u
    M[7, 3] += 0.5 * u
    b[6] = 0.5 * u
    # d<a^2> = -2 (k - i delta) <a^2> + 2 i u <aQ>
    _put(M, 8, 8, complex(-2.0 * k, 2.0 * delta))
    _put(M, 8, 4, complex(0.0, 2.0 * u))
    return M, b


def system_for(p: SystemParams):
    d = derive_params(p)
    return moment_system(d.omega_m, d.u0_bar, p.kappa, p.delta)


def moment_rhs(m: MomentState, p: SystemParams) -> MomentState:
    M, b = system_for(p)
    return MomentState.from_vector(M @ m.to_vector() + b)


def closed_form_moments(omega_m: float, u0_bar: float, kappa: float, delta: float):
    """Closed-form steady ``(n_a, q2, p2)``."""
    w, k2, d2, g2 = omega_m, kappa**2, delta**2, u0_bar**2
    den = 4.0 * w * delta * (k2 + d2) + 8.0 * g2 * d2
    if den == 0.0:
        raise NoSteadyStateError("singular steady-state denominator")
    n_a = -g2 * (d2 + k2) / den
    q2 = -((k2 + w**2 + d2) * (k2 + d2) + 2.0 * g2 * w * delta) / den
    p2 = -((k2 + w**2 + d2 + 2.0 * g2 * delta / w) * (k2 + d2) + 2.0 * g2 * w * delta) / den
    return n_a, q2, p2


def steady_state_moments(p: SystemParams) -> MomentState:
    """Exact steady state of the moment equations (all ten components).

    Raises
    ------
    NoSteadyStateError
        If the system is singular or some mode grows (heating regime), in
        which case there is no physical steady state.
    """
    d = derive_params(p)
    den = 4.0 * d.omega_m * p.delta * (p.kappa**2 + p.delta**2) + 8.0 * d.u0_bar**2 * p.delta**2
    if den == 0.0 or p.delta >= 0:
        raise NoSteadyStateError(
            f"no steady state for delta={p.delta}: denominator {den:.3g}"
        )
    M, b = moment_system(d.omega_m, d.u0_bar, p.kappa, p.delta)
    if np.max(np.linalg.eigvals(M).real) >= 0:
        raise NoSteadyStateError("moment dynamics unstable: heating regime")
    x = np.linalg.solve(M, -b)
    return MomentState.from_vector(x)


def moment_decay_rate(p: SystemParams) -> float:
    """Slowest relaxation rate of the moment dynamics (minus the largest real eigenvalue)."""
    M, _ = system_for(p)
    return float(-np.max(np.linalg.eigvals(M).real))


def occupancy_from_moments(m: MomentState) -> float:
    """Phonon number ``(q2 + p2)/2 - 1/2``; negative values are returned as is."""
    return 0.5 * (m.q2 + m.p2) - 0.5


@dataclass(frozen=True)
class MomentSeries:
    t: np.ndarray
    x: np.ndarray  # (n, 10) in FIELDS order

    @property
    def n_at(self) -> np.ndarray:
        return 0.5 * (self.x[:, 1] + self.x[:, 2]) - 0.5

    @property
    def n_a(self) -> np.ndarray:
        return self.x[:, 0]

    def state(self, i: int) -> MomentState:
        return MomentState.from_vector(self.x[i])

    def columns(self) -> dict:
        cols = {"t": self.t}
        cols.update({name: self.x[:, j] for j, name in enumerate(FIELDS)})
        cols["n_at"] = self.n_at
        return cols


def integrate_moments(m0: MomentState, p: SystemParams, t_max: float, tol: float = 1e-10,
                      t_eval=None, n_samples: int = 1001) -> MomentSeries:
    """Adaptive integration of the moment equations from ``m0``."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    M, b = system_for(p)
    if t_eval is None:
        t_eval = np.linspace(0.0, t_max, n_samples)
    sol = solve_ivp(lambda t, x: M @ x + b, (0.0, t_max), m0.to_vector(), method="DOP853",
                    t_eval=np.asarray(t_eval, float), rtol=tol, atol=tol * 1e-2)
    if sol.status != 0:
        raise IntegrationError(f"moment integration failed: {sol.message}",
                               float(sol.t[-1]) if sol.t.size else 0.0)
    return MomentSeries(sol.t, sol.y.T.copy())
