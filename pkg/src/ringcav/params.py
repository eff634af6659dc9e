"""Parameter model, derived trap quantities and regime diagnostics.

Units: every frequency is a multiple of the cavity amplitude decay rate
kappa, hbar = 1, positions are in 1/k and momenta in hbar*k.  With these
conventions the recoil frequency is the only place the particle mass enters.

Sign convention: ``u0 > 0`` is a high-field seeker (red atomic detuning); the
potential energy is ``-hbar*U(x)`` so the particle sits at the antinodes of the
driven cosine mode.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

from .errors import UntrappedError

# Numeric reading of "much less than" in the regime diagnostics.
MUCH_LESS_THAN = 0.1

HBAR = 1.054571817e-34
AMU = 1.66053906660e-27


@dataclass(frozen=True)
class SystemParams:
    """The five physical dials in units of kappa."""

    kappa: float = 1.0
    delta: float = -1.0
    u0: float = 0.01
    eta: float = 10.0
    omega_rec: float = 0.01

    def __post_init__(self):
        for name in ("kappa", "delta", "u0", "eta", "omega_rec"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.u0 < 0:
            raise ValueError(f"u0 must be >= 0, got {self.u0}")
        if self.omega_rec <= 0:
            raise ValueError(f"omega_rec must be > 0, got {self.omega_rec}")

    @classmethod
    def from_trap_frequency(cls, omega_m, delta, u0, omega_rec, kappa=1.0):
        """Parameters whose linearized trap has frequency ``omega_m``.

        The pump is chosen so that ``alpha = eta / sqrt(kappa**2 + delta**2)``
        gives the requested trap.
        """
        if u0 <= 0 or omega_m <= 0:
            raise UntrappedError("a trap needs u0 > 0 and omega_m > 0")
        alpha = omega_m / (2.0 * math.sqrt(u0 * omega_rec))
        eta = alpha * math.hypot(kappa, delta)
        return cls(kappa=kappa, delta=delta, u0=u0, eta=eta, omega_rec=omega_rec)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SystemParams":
        unknown = set(d) - {"kappa", "delta", "u0", "eta", "omega_rec"}
        if unknown:
            raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})


@dataclass(frozen=True)
class DerivedParams:
    alpha: float
    omega_m: float
    lamb_dicke: float
    u0_bar: float
    u0_prime: float


def steady_amplitude(p: SystemParams) -> float:
    """Cosine-mode amplitude alpha in the weak-coupling approximation."""
    return p.eta / math.hypot(p.kappa, p.delta)


def derive_params(p: SystemParams) -> DerivedParams:
    """Trap frequency, Lamb-Dicke factor and effective coupling.

    Raises
    ------
    UntrappedError
        If ``u0 == 0`` or ``eta == 0``: there is no trap, so omega_m vanishes
        and the Lamb-Dicke factor is undefined.
    """
    alpha = steady_amplitude(p)
    if p.u0 == 0.0 or alpha == 0.0:
        raise UntrappedError(
            f"no optical trap for u0={p.u0}, eta={p.eta}: trap quantities undefined"
        )
    omega_m = 2.0 * alpha * math.sqrt(p.u0 * p.omega_rec)
    lamb_dicke = math.sqrt(2.0 * p.omega_rec / omega_m)
    u0_bar = lamb_dicke * p.u0 * alpha
    return DerivedParams(
        alpha=alpha,
        omega_m=omega_m,
        lamb_dicke=lamb_dicke,
        u0_bar=u0_bar,
        u0_prime=p.u0 * alpha,
    )


def optimal_trap_frequency(p: SystemParams) -> float:
    """Trap frequency that satisfies ``delta == -omega_m`` self-consistently.

    Solves ``w**4 + kappa**2 w**2 - 4 omega_rec u0 eta**2 = 0`` for the
    positive root.  ``p.delta`` is ignored.
    """
    k2 = p.kappa**2
    x = 16.0 * p.omega_rec * p.u0 * p.eta**2 / k2**2
    # sqrt(1+x) - 1 written without cancellation for small x
    w2 = 0.5 * k2 * x / (math.sqrt(1.0 + x) + 1.0)
    return math.sqrt(w2)


def eta_for_optimal_trap(omega_m: float, p: SystemParams) -> float:
    """Pump amplitude giving trap frequency ``omega_m`` at ``delta = -omega_m``."""
    if omega_m <= 0:
        raise ValueError("omega_m must be positive")
    if p.u0 == 0:
        raise UntrappedError("u0 == 0: no pump produces a trap")
    return omega_m * math.sqrt((p.kappa**2 + omega_m**2) / (4.0 * p.omega_rec * p.u0))


def optimal_params(omega_m: float, p: SystemParams) -> SystemParams:
    """Copy of ``p`` pumped to ``omega_m`` and tuned to the lower sideband."""
    return p.replace(eta=eta_for_optimal_trap(omega_m, p), delta=-omega_m)


@dataclass(frozen=True)
class ValidityReport:
    localization_ok: bool
    detuning_ok: bool
    perturbative_ok: bool
    sidebands_resolved: bool
    ratios: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return (
            self.localization_ok
            and self.detuning_ok
            and self.perturbative_ok
            and self.sidebands_resolved
        )


def validity_report(p: SystemParams, much_less_than: float = MUCH_LESS_THAN) -> ValidityReport:
    """Check the regime assumptions of the linearized treatment.

    The four ratios are ``omega_rec/omega_m`` (localization), ``omega_rec/|delta|``
    (detuning above recoil), ``u0_bar/kappa`` (perturbative coupling) and the
    sideband parameter ``2 omega_rec u0 eta**2 / kappa**4``.  Never raises: an
    untrapped configuration reports infinite ratios and all trap flags false.
    """
    sideband = 2.0 * p.omega_rec * p.u0 * p.eta**2 / p.kappa**4
    try:
        d = derive_params(p)
        loc = p.omega_rec / d.omega_m
        pert = d.u0_bar / p.kappa
    except UntrappedError:
        loc = math.inf
        pert = 0.0
    det = p.omega_rec / abs(p.delta) if p.delta != 0 else math.inf
    # same bound rewritten as sideband << kappa/u0
    pert_bound = sideband * p.u0 / p.kappa if p.u0 > 0 else 0.0
    ratios = {
        "omega_rec_over_omega_m": loc,
        "omega_rec_over_abs_delta": det,
        "u0_bar_over_kappa": pert,
        "sideband_parameter": sideband,
        "sideband_parameter_over_kappa_u0": pert_bound,
    }
    return ValidityReport(
        localization_ok=loc < much_less_than,
        detuning_ok=det < 1.0,
        perturbative_ok=pert < much_less_than,
        sidebands_resolved=sideband > 1.0,
        ratios=ratios,
        thresholds={"much_less_than": much_less_than},
    )


def recoil_frequency_si(mass_amu: float, k: float, kappa_hz: float, cyclic: bool = True) -> float:
    """Dimensionless recoil frequency for an SI particle and cavity.

    Parameters
    ----------
    mass_amu : float
        Particle mass in atomic mass units.
    k : float
        Wave number in 1/m.
    kappa_hz : float
        Cavity decay given as a number "in Hz".
    cyclic : bool
        If true, ``kappa_hz`` is kappa/2pi (so kappa = 2pi*kappa_hz rad/s);
        otherwise it is already an angular rate in rad/s.
    """
    omega_rec = HBAR * k**2 / (2.0 * mass_amu * AMU)
    kappa = 2.0 * math.pi * kappa_hz if cyclic else kappa_hz
    return omega_rec / kappa
