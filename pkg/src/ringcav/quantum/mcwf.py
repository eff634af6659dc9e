"""Monte Carlo wavefunction trajectories and trajectory ensembles.

Between jumps the unnormalized state follows ``exp(-i H_eff t)`` with
``H_eff = H - (i/2) sum_k C_k^dag C_k``.  Because H_eff does not depend on
time, the no-jump evolution is exact: a ladder of propagators over ``dt``,
``dt/2``, ``dt/4``, ... is precomputed once per model and the kernel walks
it.  A jump occurs when the squared norm falls below a uniform variate drawn
after the previous jump; its time is bisected down to the finest ladder step
(``time_resolution``).  The channel is then picked with probabilities
proportional to ``||C_k psi||**2``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .. import kernel as _kernel
from ..errors import RingCavError
from .model import QuantumModel
from .observables import expectation_states, truncation_weights

THREADS_ENV = "RINGCAV_THREADS"
NORM_TOLERANCE = 1e-9


def split_seed(master_seed: int, index: int) -> int:
    """Seed of trajectory ``index``: ``SeedSequence(master_seed, spawn_key=(index,))``.

    The result depends only on the pair, never on execution order.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class Propagator:
    dt: float
    ladder: np.ndarray = field(repr=False)

    @property
    def levels(self) -> int:
        return self.ladder.shape[0]

    @property
    def unit(self) -> float:
        return self.dt / 2 ** (self.levels - 1)


def make_propagator(model: QuantumModel, dt: float, time_resolution: float = 1e-10) -> Propagator:
    """Propagators ``exp(-i H_eff dt / 2**j)`` down to ``time_resolution``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    levels = 1 + max(0, math.ceil(math.log2(dt / time_resolution)))
    h = model.effective_hamiltonian()
    ladder = np.empty((levels, model.dim, model.dim), complex)
    for j in range(levels):
        ladder[j] = expm(-1j * h * (dt / 2**j))
    return Propagator(dt, ladder)


def sample_grid(t_max: float, n_samples: int, max_step: float = 1.0):
    """Sample times and the ladder base step dividing the sample interval."""
    if n_samples < 2:
        raise ValueError("need at least two samples")
    sample_dt = t_max / (n_samples - 1)
    stride = max(1, math.ceil(sample_dt / max_step - 1e-12))
    return np.linspace(0.0, t_max, n_samples), sample_dt / stride, stride


@dataclass
class TrajectoryRecord:
    seed: int
    times: np.ndarray
    observables: dict
    jumps: list
    norms: np.ndarray
    truncation: dict

    @property
    def jump_times(self) -> np.ndarray:
        return np.array([t for t, _ in self.jumps])


class TrajectoryError(RingCavError, RuntimeError):
    def __init__(self, message, t_fail=float("nan"), index=None):
        where = f" (trajectory {index})" if index is not None else ""
        super().__init__(f"{message} at t = {t_fail:.6g}{where}")
        self.t_fail = t_fail
        self.index = index


def mcwf_trajectory(model: QuantumModel, psi0, seed: int, t_max: float, n_samples: int = 101,
                    propagator: Propagator | None = None, max_step: float = 1.0,
                    advance=None) -> TrajectoryRecord:
    """One quantum-jump trajectory.

    Parameters
    ----------
    psi0 : array or callable
        Initial state, or ``psi0(rng) -> state`` for randomized initial states
        (drawn from the trajectory's own generator).
    seed : int
        Seed of the trajectory's ``numpy.random.Generator``.
    propagator : Propagator, optional
        Reuse a ladder built for the same model and sample grid.
    advance : callable, optional
        Kernel override; defaults to the one chosen in :mod:`ringcav.kernel`.
    """
    times, dt, stride = sample_grid(t_max, n_samples, max_step)
    if propagator is None:
        propagator = make_propagator(model, dt)
    elif not math.isclose(propagator.dt, dt, rel_tol=1e-12):
        raise ValueError(f"propagator step {propagator.dt} does not match grid step {dt}")
    advance = advance or _kernel.advance
    rng = np.random.default_rng(seed)

    psi = np.array(psi0(rng) if callable(psi0) else psi0, dtype=complex)
    norm0 = np.linalg.norm(psi)
    if abs(norm0 - 1.0) > 1e-8:
        raise ValueError(f"initial state must be normalized (norm {norm0:.6g})")
    psi /= norm0

    levels = propagator.levels
    sample_units = stride << (levels - 1)
    t_stop = sample_units * (n_samples - 1)
    snaps = np.zeros((n_samples, model.dim), complex)
    norms = np.zeros(n_samples)
    snaps[0] = psi
    norms[0] = 1.0
    ops = [(j.name, j.op) for j in model.jump_ops]
    jumps = []
    t = 0
    threshold = rng.random()
    while t < t_stop:
        t, jumped = advance(psi, propagator.ladder, threshold, t, t_stop,
                            sample_units, snaps, norms)
        if not jumped:
            break
        t_jump = t * propagator.unit
        cand = [op @ psi for _, op in ops]
        weights = np.array([np.vdot(c, c).real for c in cand])
        total = weights.sum()
        if not total > 0:
            raise TrajectoryError("jump requested with zero jump probability", t_jump)
        k = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
        k = min(k, len(cand) - 1)
        psi[:] = cand[k] / math.sqrt(weights[k])
        jumps.append((t_jump, ops[k][0]))
        threshold = rng.random()

    if np.any(norms > 1.0 + NORM_TOLERANCE):
        i = int(np.argmax(norms > 1.0 + NORM_TOLERANCE))
        raise TrajectoryError(f"norm grew to {norms[i]:.12g}", float(times[i]))
    return TrajectoryRecord(
        seed=int(seed), times=times, observables=expectation_states(model, snaps),
        jumps=jumps, norms=norms, truncation=truncation_weights(model, snaps),
    )


@dataclass
class EnsembleStats:
    times: np.ndarray
    mean: dict
    sem: dict
    n_traj: int
    master_seed: int
    seeds: list
    samples: dict = field(repr=False)
    n_jumps: np.ndarray = field(repr=False, default=None)
    truncation: dict = field(default_factory=dict)


def run_ensemble(model: QuantumModel, psi0, n_traj: int, master_seed: int, t_max: float,
                 n_samples: int = 101, workers: int | None = None, max_step: float = 1.0,
                 advance=None, keep_records: bool = False):
    """Average ``n_traj`` trajectories seeded by :func:`split_seed`.

    Results are reduced in trajectory order, so they do not depend on
    ``workers``.  With ``keep_records`` the individual records are returned
    as a second value.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    workers = workers or default_workers()
    _, dt, _ = sample_grid(t_max, n_samples, max_step)
    prop = make_propagator(model, dt)
    seeds = [split_seed(master_seed, i) for i in range(n_traj)]

    def one(i):
        try:
            return mcwf_trajectory(model, psi0, seeds[i], t_max, n_samples, prop,
                                   max_step, advance)
        except TrajectoryError as exc:
            raise TrajectoryError(str(exc), exc.t_fail, i) from exc

    if workers == 1:
        records = [one(i) for i in range(n_traj)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(n_traj)))

    names = list(records[0].observables)
    samples = {k: np.stack([r.observables[k] for r in records]) for k in names}
    mean = {k: v.mean(axis=0) for k, v in samples.items()}
    if n_traj > 1:
        sem = {k: v.std(axis=0, ddof=1) / math.sqrt(n_traj) for k, v in samples.items()}
    else:
        sem = {k: np.full(v.shape[1], np.nan) for k, v in samples.items()}
    trunc = {k: max(r.truncation[k] for r in records) for k in records[0].truncation}
    stats = EnsembleStats(
        times=records[0].times, mean=mean, sem=sem, n_traj=n_traj,
        master_seed=int(master_seed), seeds=seeds, samples=samples,
        n_jumps=np.array([len(r.jumps) for r in records]), truncation=trunc,
    )
    return (stats, records) if keep_records else stats
