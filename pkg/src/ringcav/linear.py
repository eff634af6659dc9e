"""Closed-form sideband-cooling results for the linearized model.

Sign convention for the sideband scattering rate::

    A(w) = kappa * u0_bar**2 / (kappa**2 + (w + delta)**2)

so the Lorentzian peaks at ``w = -delta``.  With ``Gamma = A(w_m) - A(-w_m)``
this is the only choice that makes Gamma positive at ``delta = -w_m`` and gives
``n_at = A(-w_m) / Gamma = (kappa**2 + (w_m + delta)**2) / (-4 w_m delta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import HeatingRegimeError
from .params import SystemParams, derive_params


@dataclass(frozen=True)
class SidebandResult:
    a_plus: float
    a_minus: float
    gamma_cool: float
    n_at: float
    n_a: float
    divergence_warning: bool = False


def lorentzian_rate(omega: float, kappa: float, delta: float, u0_bar: float) -> float:
    return kappa * u0_bar**2 / (kappa**2 + (omega + delta) ** 2)


def sideband_rate(omega: float, p: SystemParams) -> float:
    """Scattering rate into the sideband at frequency ``omega``."""
    return lorentzian_rate(omega, p.kappa, p.delta, derive_params(p).u0_bar)


def final_occupancy(omega_m: float, kappa: float, delta: float) -> float:
    """Steady phonon number of the linearized oscillator (weak coupling)."""
    return (kappa**2 + (omega_m + delta) ** 2) / (-4.0 * omega_m * delta)


def cooling_summary(p: SystemParams) -> SidebandResult:
    """Anti-Stokes/Stokes rates, cooling rate, final occupancy and sine-mode photons.

    ``n_a`` is the weak-coupling value ``u0 / (-8 delta)``; the exact value for
    arbitrary coupling comes from :func:`ringcav.moments.steady_state_moments`.

    Raises
    ------
    HeatingRegimeError
        If ``delta >= 0``.
    """
    if p.delta >= 0:
        raise HeatingRegimeError(f"delta = {p.delta} >= 0 is on the heating side")
    d = derive_params(p)
    wm = d.omega_m
    a_plus = lorentzian_rate(wm, p.kappa, p.delta, d.u0_bar)
    a_minus = lorentzian_rate(-wm, p.kappa, p.delta, d.u0_bar)
    diverging = abs(p.delta) < p.omega_rec
    if diverging:
        warnings.warn(
            f"|delta| = {abs(p.delta):g} < omega_rec = {p.omega_rec:g}: "
            "the linearized results are outside their validity range",
            RuntimeWarning, stacklevel=2,
        )
    return SidebandResult(
        a_plus=a_plus,
        a_minus=a_minus,
        gamma_cool=a_plus - a_minus,
        n_at=final_occupancy(wm, p.kappa, p.delta),
        n_a=p.u0 / (-8.0 * p.delta),
        divergence_warning=diverging,
    )


def optimal_cooling_rate(omega_m: float, u0: float, kappa: float = 1.0) -> float:
    """Gamma at ``delta = -omega_m`` as a function of the trap frequency alone."""
    u0_bar_sq = 0.5 * u0 * omega_m
    return u0_bar_sq * kappa * (1.0 / kappa**2 - 1.0 / (kappa**2 + 4.0 * omega_m**2))


@dataclass(frozen=True)
class SpontaneousEmissionParams:
    gamma: float
    g: float
    delta_a: float

    @property
    def gamma0(self) -> float:
        return self.gamma * self.g**2 / self.delta_a**2


@dataclass(frozen=True)
class SpontaneousCorrections:
    gamma0_bar: float
    renormalized_coupling: float
    diffusion_rate: float


def spontaneous_corrections(p: SystemParams, se: SpontaneousEmissionParams) -> SpontaneousCorrections:
    """Lowest-order effect of absorption on the linearized model.

    The absorptive part ``gamma0_bar = (k x_zpm) gamma0 alpha`` adds in
    quadrature to the coupling.  The momentum-diffusion rate
    ``gamma0_bar alpha**2 (k x_zpm)**2`` is only known up to a geometric
    factor, which is set to one.
    """
    if se.delta_a == 0:
        raise ValueError("delta_a must be nonzero")
    d = derive_params(p)
    g0_bar = d.lamb_dicke * se.gamma0 * d.alpha
    return SpontaneousCorrections(
        gamma0_bar=g0_bar,
        renormalized_coupling=math.hypot(d.u0_bar, g0_bar),
        diffusion_rate=g0_bar * d.alpha**2 * d.lamb_dicke**2,
    )
