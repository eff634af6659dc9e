"""Exception types shared across the package."""


class RingCavError(Exception):
    """Base class for all package errors."""


class UntrappedError(RingCavError, ValueError):
    """No optical trap exists (u0 == 0 or eta == 0)."""


class HeatingRegimeError(RingCavError, ValueError):
    """The requested quantity only exists on the cooling side (delta < 0)."""


class NoSteadyStateError(RingCavError, ArithmeticError):
    """The moment equations have no steady state for these parameters."""


class IntegrationError(RingCavError, RuntimeError):
    """An ODE integration failed.

    Attributes
    ----------
    t_fail : float
        Time at which the integrator gave up.
    """

    def __init__(self, message, t_fail=float("nan")):
        super().__init__(f"{message} (t = {t_fail:.6g})")
        self.t_fail = t_fail


class TruncationError(RingCavError, ValueError):
    """A Hilbert-space cutoff is too small for the requested state or drive."""


class DimensionGuardError(RingCavError, ValueError):
    """Dense density-matrix evolution refused for a too-large space."""


class DegenerateFitError(RingCavError, ValueError):
    """The data cannot determine an exponential fit."""


class ConfigError(RingCavError, ValueError):
    """Run configuration failed validation."""
