"""Cooling-rate fits, parameter sweeps and quantum-jump statistics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from . import linear, moments
from .errors import DegenerateFitError, RingCavError
from .params import SystemParams, derive_params, optimal_params, optimal_trap_frequency

# Occupancy separating trap levels 0 and 1 in jump classification.
LEVEL_THRESHOLD = 0.5
# Fewer transitions than this make dwell statistics low-confidence.
MIN_TRANSITIONS = 5
# Initial transient dropped before fitting, in units of 1/kappa.
DEFAULT_TRANSIENT = 5.0


# --------------------------------------------------------------------------
# exponential fits

@dataclass(frozen=True)
class FitResult:
    rate: float
    amplitude: float
    offset: float
    residual_norm: float
    covariance: np.ndarray
    converged: bool = True
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "rate": self.rate, "amplitude": self.amplitude, "offset": self.offset,
            "residual_norm": self.residual_norm, "covariance": self.covariance.tolist(),
            "converged": self.converged, "message": self.message,
        }


def _initial_guess(t, y):
    tail = max(2, len(y) // 4)
    c0 = float(np.mean(y[-tail:]))
    a0 = float(y[0] - c0)
    z = (y - c0) * np.sign(a0 or 1.0)
    ok = z > 0
    g0 = 0.0
    if ok.sum() >= 2:
        slope = np.polyfit(t[ok] - t[0], np.log(z[ok]), 1)[0]
        g0 = max(float(-slope), 0.0)
    if g0 == 0.0:
        g0 = 1.0 / max(t[-1] - t[0], 1e-300)
    return a0, g0, c0


def fit_exponential(t, y, transient: float = 0.0) -> FitResult:
    """Least-squares fit of ``y = A exp(-gamma (t - t0)) + C``.

    Samples with ``t < t[0] + transient`` are dropped first.  The start point
    is fixed by the data (C from the tail mean, A from the first sample,
    gamma from a log-linear fit), so the result is deterministic.  If the
    refinement fails the start point is returned with ``converged=False``.

    Raises
    ------
    DegenerateFitError
        Fewer than 8 samples or constant data.
    """
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    keep = t >= t[0] + transient
    t, y = t[keep], y[keep]
    if len(t) < 8:
        raise DegenerateFitError(f"need at least 8 samples, got {len(t)}")
    if np.ptp(y) == 0.0:
        raise DegenerateFitError("degenerate fit: constant series")
    t0 = t[0]
    a0, g0, c0 = _initial_guess(t, y)
    scale = float(np.max(np.abs(y))) or 1.0

    def resid(q):
        a, lg, c = q
        return (a * np.exp(-np.exp(lg) * (t - t0)) + c - y) / scale

    start = np.array([a0, math.log(g0), c0])
    try:
        sol = least_squares(resid, start, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=20000)
        ok = bool(sol.success) and np.all(np.isfinite(sol.x))
    except (ValueError, FloatingPointError) as exc:
        sol, ok = None, False
        msg = str(exc)
    if not ok:
        r = resid(start) * scale
        return FitResult(g0, a0, c0, float(np.linalg.norm(r)), np.full((3, 3), np.nan),
                         converged=False,
                         message=msg if sol is None else f"no convergence: {sol.message}")
    a, lg, c = sol.x
    g = math.exp(lg)
    r = sol.fun * scale
    # covariance in (A, gamma, C) from the Jacobian of the log-rate problem
    jac = sol.jac * scale
    jac = jac * np.array([1.0, 1.0 / g, 1.0])
    dof = max(len(t) - 3, 1)
    s2 = float(r @ r) / dof
    try:
        cov = np.linalg.inv(jac.T @ jac) * s2
    except np.linalg.LinAlgError:
        cov = np.full((3, 3), np.inf)
    return FitResult(g, float(a), float(c), float(np.linalg.norm(r)), cov, True, str(sol.message))


# --------------------------------------------------------------------------
# sweeps

AXES = ("eta", "delta", "u0", "omega_rec", "kappa", "omega_m")

# quantity -> (tier, function(params) -> float)
def _moments_ss(p):
    return moments.steady_state_moments(p)


ANALYTIC_QUANTITIES = {
    "alpha": ("params", lambda p: derive_params(p).alpha),
    "omega_m": ("params", lambda p: derive_params(p).omega_m),
    "u0_bar": ("params", lambda p: derive_params(p).u0_bar),
    "lamb_dicke": ("params", lambda p: derive_params(p).lamb_dicke),
    "delta": ("params", lambda p: p.delta),
    "eta": ("params", lambda p: p.eta),
    "trap_over_detuning": ("params", lambda p: -derive_params(p).omega_m / p.delta),
    "gamma_linear": ("linear", lambda p: linear.cooling_summary(p).gamma_cool),
    "n_at_linear": ("linear", lambda p: linear.cooling_summary(p).n_at),
    "n_a_linear": ("linear", lambda p: linear.cooling_summary(p).n_a),
    "n_at_moments": ("moments", lambda p: moments.occupancy_from_moments(_moments_ss(p))),
    "n_a_moments": ("moments", lambda p: _moments_ss(p).n_a),
    "q2_moments": ("moments", lambda p: _moments_ss(p).q2),
    "p2_moments": ("moments", lambda p: _moments_ss(p).p2),
    "rate_moments": ("moments", moments.moment_decay_rate),
}

QUANTUM_QUANTITIES = ("e_kin_mcwf", "n_at_mcwf", "n_sine_mcwf", "rate_mcwf")


@dataclass
class QuantumSweepSettings:
    """Ensemble settings for quantum-tier sweep columns."""

    n_mom: int = 16
    n_fock_sine: int = 6
    parity: str | None = "even"
    n_traj: int = 20
    t_max: float = 100.0
    n_samples: int = 101
    initial_e_kin: float = 25.0
    average_window: float = 20.0
    master_seed: int = 0
    workers: int | None = None


@dataclass
class SweepSpec:
    base: SystemParams
    axis: str
    grid: np.ndarray
    quantities: tuple = ("n_at_linear", "gamma_linear")
    optimal_detuning: bool = False
    series_name: str | None = None
    series_values: tuple = ()
    quantum: QuantumSweepSettings | None = None


@dataclass
class SweepTable:
    axis: str
    grid: np.ndarray
    series_name: str | None
    columns: dict
    provenance: dict
    errors: list = field(default_factory=list)

    def column_order(self) -> list:
        return list(self.columns)

    def to_rows(self):
        names = self.column_order()
        n = len(self.columns[names[0]])
        return names, [[self.columns[k][i] for k in names] for i in range(n)]


def _point_params(spec: SweepSpec, base: SystemParams, value: float) -> SystemParams:
    if spec.axis == "omega_m":
        if spec.optimal_detuning:
            return base.replace(delta=-value, eta=_eta_for(value, base.replace(delta=-value)))
        return base.replace(eta=_eta_for(value, base))
    p = base.replace(**{spec.axis: float(value)})
    if spec.optimal_detuning:
        p = p.replace(delta=-optimal_trap_frequency(p))
    return p


def _eta_for(omega_m: float, p: SystemParams) -> float:
    return SystemParams.from_trap_frequency(omega_m, p.delta, p.u0, p.omega_rec, p.kappa).eta


def _quantum_cell(p: SystemParams, q: QuantumSweepSettings, seed: int) -> dict:
    from .quantum import HilbertSpace, build_model, hot_momentum, momentum_state, run_ensemble

    space = HilbertSpace(n_mom=q.n_mom, n_fock_sine=q.n_fock_sine, parity=q.parity)
    model = build_model(p, space)
    psi0 = momentum_state(model, hot_momentum(space, p.omega_rec, q.initial_e_kin))
    stats = run_ensemble(model, psi0, q.n_traj, seed, q.t_max, q.n_samples, workers=q.workers)
    late = stats.times >= stats.times[-1] - q.average_window
    out = {
        "e_kin_mcwf": float(stats.mean["e_kin"][late].mean()),
        "n_at_mcwf": float(stats.mean["n_at"][late].mean()),
        "n_sine_mcwf": float(stats.mean["n_sine"][late].mean()),
    }
    try:
        fit = fit_exponential(stats.times, stats.mean["e_kin"], DEFAULT_TRANSIENT)
        out["rate_mcwf"] = fit.rate
    except DegenerateFitError:
        out["rate_mcwf"] = float("nan")
    return out


def sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate the requested quantities on a one-dimensional grid.

    Each grid point (and series value, if any) becomes one row.  A failing
    cell stores NaN and an entry in ``errors``; the sweep continues.  Quantum
    cells use seed ``split_seed(master_seed, row_index)``.
    """
    grid = np.asarray(spec.grid, float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if grid.size > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
        raise ValueError("grid must be strictly monotone")
    if spec.axis not in AXES:
        raise ValueError(f"unknown sweep axis {spec.axis!r}; choose from {AXES}")
    unknown = [q for q in spec.quantities
               if q not in ANALYTIC_QUANTITIES and q not in QUANTUM_QUANTITIES]
    if unknown:
        raise ValueError(f"unknown quantities {unknown}")
    quantum_q = [q for q in spec.quantities if q in QUANTUM_QUANTITIES]
    if quantum_q and spec.quantum is None:
        spec.quantum = QuantumSweepSettings()

    series = list(spec.series_values) if spec.series_name else [None]
    cols = {}
    if spec.series_name:
        cols[spec.series_name] = []
    cols[spec.axis] = []
    for q in spec.quantities:
        cols[q] = []
    prov = {spec.axis: "input"}
    if spec.series_name:
        prov[spec.series_name] = "input"
    for q in spec.quantities:
        prov[q] = "quantum" if q in QUANTUM_QUANTITIES else ANALYTIC_QUANTITIES[q][0]
    errors = []

    row = 0
    for s in series:
        base = spec.base if s is None else spec.base.replace(**{spec.series_name: float(s)})
        for value in grid:
            if spec.series_name:
                cols[spec.series_name].append(float(s))
            cols[spec.axis].append(float(value))
            try:
                p = _point_params(spec, base, value)
            except (RingCavError, ValueError) as exc:
                p = None
                errors.append({"row": row, "column": "*", "error": str(exc)})
            qvals = {}
            if p is not None and quantum_q:
                from .quantum.mcwf import split_seed
                try:
                    qvals = _quantum_cell(p, spec.quantum, split_seed(spec.quantum.master_seed, row))
                except (RingCavError, ValueError) as exc:
                    errors.append({"row": row, "column": "quantum", "error": str(exc)})
            for q in spec.quantities:
                val = float("nan")
                if p is not None:
                    if q in QUANTUM_QUANTITIES:
                        val = qvals.get(q, float("nan"))
                    else:
                        try:
                            with warnings.catch_warnings():
                                warnings.simplefilter("ignore", RuntimeWarning)
                                val = float(ANALYTIC_QUANTITIES[q][1](p))
                        except (RingCavError, ValueError, ArithmeticError) as exc:
                            errors.append({"row": row, "column": q, "error": str(exc)})
                cols[q].append(val)
            row += 1
    return SweepTable(spec.axis, grid, spec.series_name,
                      {k: np.asarray(v, float) for k, v in cols.items()}, prov, errors)


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# --------------------------------------------------------------------------
# quantum-jump statistics

@dataclass
class JumpStats:
    dwell_times: dict
    transitions: dict
    n_transitions: int
    correlation: float
    n_photon_jumps: int
    low_confidence: bool
    threshold: float

    def to_dict(self) -> dict:
        return {
            "dwell_times": {str(k): list(map(float, v)) for k, v in self.dwell_times.items()},
            "mean_dwell": {str(k): (float(np.mean(v)) if len(v) else None)
                           for k, v in self.dwell_times.items()},
            "transitions": dict(self.transitions),
            "n_transitions": self.n_transitions,
            "correlation": self.correlation,
            "n_photon_jumps": self.n_photon_jumps,
            "low_confidence": self.low_confidence,
            "threshold": self.threshold,
        }


def classify_levels(n_at, threshold: float = LEVEL_THRESHOLD) -> np.ndarray:
    return (np.asarray(n_at) > threshold).astype(int)


def jump_statistics(times, n_at, n_sine=None, photon_jumps=(), threshold: float = LEVEL_THRESHOLD,
                    min_dwell: int = 1) -> JumpStats:
    """Telegraph analysis of a single-trajectory occupancy series.

    The occupancy is thresholded into level 0 / level 1.  A level change is
    a transition if the new level then persists for at least ``min_dwell``
    samples.  Dwell times are collected for completed visits only (the
    visits cut by the start and end of the record are dropped).  The Pearson
    correlation between ``n_at`` and ``n_sine`` is NaN if either is constant.
    """
    t = np.asarray(times, float)
    levels = classify_levels(n_at, threshold)
    # suppress flickers shorter than min_dwell samples
    if min_dwell > 1:
        levels = levels.copy()
        i = 1
        while i < len(levels):
            if levels[i] != levels[i - 1]:
                j = i
                while j < len(levels) and levels[j] == levels[i]:
                    j += 1
                if j - i < min_dwell and j < len(levels):
                    levels[i:j] = levels[i - 1]
                i = j
            else:
                i += 1
    change = np.nonzero(np.diff(levels))[0] + 1
    transitions = {"0->1": 0, "1->0": 0}
    for i in change:
        transitions[f"{levels[i - 1]}->{levels[i]}"] += 1
    dwell = {0: [], 1: []}
    for a, b in zip(change[:-1], change[1:]):
        dwell[int(levels[a])].append(float(t[b] - t[a]))
    corr = float("nan")
    if n_sine is not None:
        x = np.asarray(n_at, float)
        y = np.asarray(n_sine, float)
        if np.ptp(x) > 0 and np.ptp(y) > 0:
            corr = float(np.corrcoef(x, y)[0, 1])
    n_tr = int(len(change))
    return JumpStats(dwell, transitions, n_tr, corr, len(photon_jumps),
                     n_tr < MIN_TRANSITIONS, threshold)


def trajectory_jump_statistics(record, threshold: float = LEVEL_THRESHOLD, min_dwell: int = 1) -> JumpStats:
    """:func:`jump_statistics` on a :class:`~ringcav.quantum.TrajectoryRecord`."""
    obs = record.observables
    if "n_at" not in obs or "n_sine" not in obs:
        raise ValueError("trajectory lacks n_at / n_sine series")
    return jump_statistics(record.times, obs["n_at"], obs["n_sine"], record.jumps,
                           threshold, min_dwell)
