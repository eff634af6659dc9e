"""Mean-field dynamics of the two cavity modes and the particle.

Noise operators are dropped and operator products are factorized, leaving
six real equations: the complex cosine and sine amplitudes plus x and p.
The standing-wave cavity is the same system with the cross term ``u_cs``
switched off.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError
from .params import SystemParams


class Geometry(enum.Enum):
    RING = "ring"
    STANDING_WAVE = "standing"


@dataclass(frozen=True)
class PotentialTriple:
    """Light shifts and their derivatives with respect to kx."""

    u_c: np.ndarray
    u_s: np.ndarray
    u_cs: np.ndarray
    du_c: np.ndarray
    du_s: np.ndarray
    du_cs: np.ndarray


def potentials(x, u0: float, geometry: Geometry = Geometry.RING) -> PotentialTriple:
    x = np.asarray(x, dtype=float)
    c2 = np.cos(2.0 * x)
    s2 = np.sin(2.0 * x)
    u_c = 0.5 * u0 * (1.0 + c2)
    u_s = 0.5 * u0 * (1.0 - c2)
    if geometry is Geometry.STANDING_WAVE:
        u_cs = np.zeros_like(x)
        du_cs = np.zeros_like(x)
    else:
        u_cs = 0.5 * u0 * s2
        du_cs = u0 * c2
    return PotentialTriple(u_c, u_s, u_cs, -u0 * s2, u0 * s2, du_cs)


@dataclass(frozen=True)
class ClassicalState:
    alpha_c: complex
    alpha_s: complex
    x: float
    p: float

    def to_vector(self) -> np.ndarray:
        return np.array([
            self.alpha_c.real, self.alpha_c.imag,
            self.alpha_s.real, self.alpha_s.imag,
            self.x, self.p,
        ])

    @classmethod
    def from_vector(cls, v) -> "ClassicalState":
        return cls(complex(v[0], v[1]), complex(v[2], v[3]), float(v[4]), float(v[5]))

    @classmethod
    def adiabatic(cls, params: SystemParams, x0: float = 0.0, p0: float = 0.0,
                  geometry: Geometry = Geometry.RING) -> "ClassicalState":
        """Particle at ``(x0, p0)`` with the cosine mode at its steady value and an empty sine mode."""
        pot = potentials(x0, params.u0, geometry)
        alpha_c = params.eta / (params.kappa - 1j * (params.delta + float(pot.u_c)))
        return cls(complex(alpha_c), 0j, float(x0), float(p0))


def _rhs_vector(t, y, params: SystemParams, geometry: Geometry):
    ac = complex(y[0], y[1])
    as_ = complex(y[2], y[3])
    x, p = y[4], y[5]
    u0 = params.u0
    c2 = math.cos(2.0 * x)
    s2 = math.sin(2.0 * x)
    u_c = 0.5 * u0 * (1.0 + c2)
    u_s = 0.5 * u0 * (1.0 - c2)
    ring = geometry is Geometry.RING
    u_cs = 0.5 * u0 * s2 if ring else 0.0
    du_cs = u0 * c2 if ring else 0.0
    k, d = params.kappa, params.delta
    dac = (-k + 1j * (d + u_c)) * ac + 1j * u_cs * as_ + params.eta
    das = (-k + 1j * (d + u_s)) * as_ + 1j * u_cs * ac
    dx = 2.0 * params.omega_rec * p
    # potential energy is -U, so the force is +dU/d(kx)
    dp = (u0 * s2 * (abs(as_) ** 2 - abs(ac) ** 2)
          + 2.0 * (ac.conjugate() * as_).real * du_cs)
    return np.array([dac.real, dac.imag, das.real, das.imag, dx, dp])


def classical_rhs(s: ClassicalState, params: SystemParams,
                  geometry: Geometry = Geometry.RING) -> ClassicalState:
    """Time derivative of the mean-field state, packed as a ClassicalState."""
    return ClassicalState.from_vector(_rhs_vector(0.0, s.to_vector(), params, geometry))


def classical_energy(y, params: SystemParams, geometry: Geometry = Geometry.RING):
    """``omega_rec p**2 - U(x)``; conserved when kappa = eta = 0.

    ``y`` is a state vector or an ``(n, 6)`` array of them.
    """
    y = np.atleast_2d(y)
    ac = y[:, 0] + 1j * y[:, 1]
    as_ = y[:, 2] + 1j * y[:, 3]
    pot = potentials(y[:, 4], params.u0, geometry)
    u = (np.abs(ac) ** 2 * pot.u_c + np.abs(as_) ** 2 * pot.u_s
         + 2.0 * (ac.conj() * as_).real * pot.u_cs)
    return params.omega_rec * y[:, 5] ** 2 - u


@dataclass(frozen=True)
class ClassicalSeries:
    t: np.ndarray
    y: np.ndarray  # (n, 6): Re/Im alpha_c, Re/Im alpha_s, x, p
    params: SystemParams
    geometry: Geometry

    @property
    def alpha_c(self):
        return self.y[:, 0] + 1j * self.y[:, 1]

    @property
    def alpha_s(self):
        return self.y[:, 2] + 1j * self.y[:, 3]

    @property
    def x(self):
        return self.y[:, 4]

    @property
    def p(self):
        return self.y[:, 5]

    @property
    def e_kin(self):
        return self.params.omega_rec * self.y[:, 5] ** 2

    def state(self, i: int) -> ClassicalState:
        return ClassicalState.from_vector(self.y[i])

    def columns(self) -> dict:
        return {
            "t": self.t,
            "re_alpha_c": self.y[:, 0],
            "im_alpha_c": self.y[:, 1],
            "re_alpha_s": self.y[:, 2],
            "im_alpha_s": self.y[:, 3],
            "x": self.x,
            "p": self.p,
            "e_kin": self.e_kin,
        }


def integrate_classical(s0: ClassicalState, params: SystemParams,
                        geometry: Geometry = Geometry.RING, t_max: float = 100.0,
                        tol: float = 1e-8, t_eval=None, n_samples: int = 2001) -> ClassicalSeries:
    """Integrate the mean-field equations with an adaptive Dormand-Prince scheme.

    Output is dense-interpolated onto ``t_eval`` (default: ``n_samples``
    equally spaced times in ``[0, t_max]``).
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if not 0 < tol <= 1e-3:
        raise ValueError("tol must lie in (0, 1e-3]")
    if t_eval is None:
        t_eval = np.linspace(0.0, t_max, n_samples)
    t_eval = np.asarray(t_eval, dtype=float)
    sol = solve_ivp(
        _rhs_vector, (0.0, t_max), s0.to_vector(), method="DOP853",
        t_eval=t_eval, rtol=tol, atol=tol * 1e-3, args=(params, geometry),
    )
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationError(f"classical integration failed: {sol.message}", t_fail)
    return ClassicalSeries(sol.t, sol.y.T.copy(), params, geometry)


def energy_envelope(t, e, window: float) -> np.ndarray:
    """Running maximum of ``e`` over the trailing time ``window``."""
    t = np.asarray(t)
    e = np.asarray(e)
    out = np.empty_like(e)
    lo = 0
    for i in range(len(t)):
        while t[i] - t[lo] > window:
            lo += 1
        out[i] = e[lo:i + 1].max()
    return out


@dataclass(frozen=True)
class GeometryRun:
    series: ClassicalSeries
    envelope: np.ndarray
    x_excursion: float
    half_energy_time: float


@dataclass(frozen=True)
class ComparisonSummary:
    ring: GeometryRun
    standing: GeometryRun
    window: float


def _summarize(series: ClassicalSeries, window: float) -> GeometryRun:
    env = energy_envelope(series.t, series.e_kin, window)
    e0 = series.e_kin[0]
    below = np.nonzero(env <= 0.5 * e0)[0] if e0 > 0 else np.array([0])
    t_half = float(series.t[below[0]]) if below.size else float("inf")
    excursion = float(np.max(np.abs(series.x - series.x[0])))
    return GeometryRun(series, env, excursion, t_half)


def compare_geometries(params: SystemParams, s0: ClassicalState, t_max: float,
                       tol: float = 1e-8, n_samples: int = 5001,
                       window: float | None = None) -> ComparisonSummary:
    """Run ring and standing-wave cavities from the same initial condition.

    Kinetic energy oscillates inside the well, so cooling is judged on its
    running maximum over ``window`` (default: one linearized trap period, or
    zero when there is no trap).
    """
    if window is None:
        from .params import derive_params
        from .errors import UntrappedError
        try:
            window = 2.0 * np.pi / derive_params(params).omega_m
        except UntrappedError:
            window = 0.0
    t_eval = np.linspace(0.0, t_max, n_samples)
    runs = {}
    for g in (Geometry.RING, Geometry.STANDING_WAVE):
        series = integrate_classical(s0, params, g, t_max, tol, t_eval=t_eval)
        runs[g] = _summarize(series, window)
    return ComparisonSummary(runs[Geometry.RING], runs[Geometry.STANDING_WAVE], window)
