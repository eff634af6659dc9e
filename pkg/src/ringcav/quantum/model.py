"""Hamiltonian, collapse operators and observables of the full quantum model."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.special import eval_hermite, gammaln
from scipy.stats import poisson

from ..errors import TruncationError, UntrappedError
from ..params import DerivedParams, SystemParams, derive_params, steady_amplitude
from .space import HilbertSpace, basis

# Largest tolerated coherent-state population above the cosine-mode cutoff.
COHERENT_TAIL_TOLERANCE = 1e-6


class Treatment(enum.Enum):
    FULL_TWO_MODE = "full"
    COHERENT_COSINE = "coherent"


@dataclass(frozen=True)
class JumpOp:
    name: str
    rate: float
    op: sp.csr_matrix  # already multiplied by sqrt(rate)


@dataclass(frozen=True, eq=False)
class QuantumModel:
    params: SystemParams
    space: HilbertSpace
    treatment: Treatment
    hamiltonian: sp.csr_matrix
    jump_ops: tuple
    observables: dict
    alpha: float
    energy_offset: float
    trap_energies: np.ndarray
    trap_vectors: np.ndarray = field(repr=False)
    derived: DerivedParams | None = None

    @property
    def dim(self) -> int:
        return self.space.dim

    def effective_hamiltonian(self) -> np.ndarray:
        """Dense ``H - (i/2) sum_k C_k^dag C_k``."""
        h = self.hamiltonian.toarray()
        for j in self.jump_ops:
            c = j.op
            h = h - 0.5j * (c.conj().T @ c).toarray()
        return h


def trap_hamiltonian(space: HilbertSpace, omega_rec: float, depth: float) -> np.ndarray:
    """``omega_rec n**2 - depth cos**2(kx)`` on the motional factor (dense)."""
    n = space.momenta.astype(float)
    h = np.diag(omega_rec * n**2 - 0.5 * depth) - 0.5 * depth * space.cos2_op().toarray()
    return h


def trap_eigenbasis(space: HilbertSpace, omega_rec: float, depth: float):
    """Eigenstates of the lattice well, labelled by band index.

    Each parity sector is diagonalized separately and its states are numbered
    0, 1, 2, ... by energy, so the two Bloch states of the same band (one per
    sector) share a label.  Returns ``(energies, vectors, band)`` with
    ``vectors[:, i]`` in the motional basis of ``space``.
    """
    h = trap_hamiltonian(space, omega_rec, depth)
    n = space.momenta
    m = len(n)
    energies = np.empty(m)
    vectors = np.zeros((m, m), complex)
    band = np.empty(m, int)
    col = 0
    for par in (0, 1):
        idx = np.nonzero(n % 2 == par)[0]
        if idx.size == 0:
            continue
        e, v = np.linalg.eigh(h[np.ix_(idx, idx)])
        for k in range(idx.size):
            energies[col] = e[k]
            vectors[idx, col] = v[:, k]
            band[col] = k
            col += 1
    return energies, vectors, band


def harmonic_state(space: HilbertSpace, level: int, lamb_dicke: float) -> np.ndarray:
    """Harmonic-oscillator level ``level`` sampled on the momentum grid.

    In momentum space the oscillator eigenfunctions are Hermite functions of
    ``P = n * lamb_dicke`` with an extra phase ``(-i)**level``.  The sampled
    vector is renormalized on the discrete grid.
    """
    P = space.momenta * lamb_dicke
    log_norm = -0.5 * (level * math.log(2.0) + gammaln(level + 1))
    amp = eval_hermite(level, P) * np.exp(-0.5 * P**2 + log_norm)
    v = (-1j) ** level * amp.astype(complex)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise TruncationError("harmonic state has no weight on the momentum grid")
    return v / nrm


def _coherent_tail(alpha: float, n_cut: int) -> float:
    return float(poisson.sf(n_cut, alpha**2))


def build_model(p: SystemParams, space: HilbertSpace | None = None,
                treatment: Treatment = Treatment.COHERENT_COSINE) -> QuantumModel:
    """Assemble the Hamiltonian, collapse operators and observables.

    Full two-mode Hamiltonian (hbar = 1)::

        H = w_rec n^2 - delta (a_c^+ a_c + a_s^+ a_s)
            - [a_c^+ a_c U_c + a_s^+ a_s U_s + (a_c^+ a_s + a_c a_s^+) U_cs]
            + i eta (a_c^+ - a_c)

    with ``U_c = u0 cos^2 kx``, ``U_s = u0 sin^2 kx``, ``U_cs = u0 sin kx cos kx``.
    In the coherent-cosine treatment ``a_c -> alpha`` (real); the drive term
    disappears and the constant ``-(delta + u0/2) alpha**2`` is kept in H and
    reported as ``energy_offset``.  Each quantized mode decays through the
    collapse operator ``sqrt(2 kappa) a``.
    """
    space = space or HilbertSpace()
    coherent = treatment is Treatment.COHERENT_COSINE
    if coherent and space.n_fock_cos is not None:
        raise ValueError("coherent-cosine treatment needs n_fock_cos=None")
    if not coherent and space.n_fock_cos is None:
        raise ValueError("full two-mode treatment needs an n_fock_cos cutoff")

    alpha = steady_amplitude(p)
    try:
        derived = derive_params(p)
    except UntrappedError:
        derived = None
    if not coherent:
        tail = _coherent_tail(alpha, space.n_fock_cos)
        if tail > COHERENT_TAIL_TOLERANCE:
            raise TruncationError(
                f"cosine-mode cutoff {space.n_fock_cos} too small for |alpha|^2 = "
                f"{alpha**2:.3g}: population above cutoff {tail:.2e}"
            )

    u0 = p.u0
    n_p = space.momentum_op()
    cos2 = space.cos2_op()
    sin2 = space.sin2_op()
    eye_m = sp.identity(space.n_motion, format="csr")
    u_c = 0.5 * u0 * (eye_m + cos2)
    u_s = 0.5 * u0 * (eye_m - cos2)
    u_cs = 0.5 * u0 * sin2

    a_s = space.destroy(space.n_sine)
    n_s_op = (a_s.T @ a_s).tocsr()
    kin = space.embed(motion=p.omega_rec * (n_p @ n_p))
    n_sine = space.embed(sine=n_s_op)

    if coherent:
        offset = -(p.delta + 0.5 * u0) * alpha**2
        h = (kin - p.delta * n_sine
             - space.embed(motion=alpha**2 * u_c)
             - space.embed(motion=u_s, sine=n_s_op)
             - alpha * space.embed(motion=u_cs, sine=(a_s + a_s.T)))
        h = h + offset * sp.identity(space.dim, format="csr")
        jumps = (JumpOp("sine", 2.0 * p.kappa, math.sqrt(2.0 * p.kappa) * space.embed(sine=a_s)),)
    else:
        offset = 0.0
        a_c = space.destroy(space.n_cos)
        n_c_op = (a_c.T @ a_c).tocsr()
        n_cos = space.embed(cos=n_c_op)
        mix = space.embed(motion=u_cs, sine=a_s, cos=a_c.T) + space.embed(motion=u_cs, sine=a_s.T, cos=a_c)
        h = (kin - p.delta * (n_cos + n_sine)
             - space.embed(motion=u_c, cos=n_c_op)
             - space.embed(motion=u_s, sine=n_s_op)
             - mix
             + 1j * p.eta * (space.embed(cos=a_c.T) - space.embed(cos=a_c)))
        jumps = (
            JumpOp("sine", 2.0 * p.kappa, math.sqrt(2.0 * p.kappa) * space.embed(sine=a_s)),
            JumpOp("cos", 2.0 * p.kappa, math.sqrt(2.0 * p.kappa) * space.embed(cos=a_c)),
        )
    h = sp.csr_matrix(h)
    h.eliminate_zeros()

    depth = u0 * alpha**2
    energies, vectors, band = trap_eigenbasis(space, p.omega_rec, depth)
    n_trap = (vectors * band) @ vectors.conj().T
    proj0 = vectors[:, band == 0] @ vectors[:, band == 0].conj().T
    proj1 = vectors[:, band == 1] @ vectors[:, band == 1].conj().T

    obs = {
        "e_kin": kin,
        "n_sine": n_sine,
        "cos2kx": space.embed(motion=cos2),
        "sin2kx": space.embed(motion=sin2),
        "n_at": space.embed(motion=sp.csr_matrix(n_trap)),
        "p_level0": space.embed(motion=sp.csr_matrix(proj0)),
        "p_level1": space.embed(motion=sp.csr_matrix(proj1)),
    }
    if not coherent:
        obs["n_cos"] = n_cos
    order = np.argsort(band, kind="stable")
    return QuantumModel(
        params=p, space=space, treatment=treatment, hamiltonian=h,
        jump_ops=jumps, observables=obs, alpha=alpha, energy_offset=offset,
        trap_energies=energies[order], trap_vectors=vectors[:, order], derived=derived,
    )


def momentum_state(model: QuantumModel, n: int) -> np.ndarray:
    """``|p = n hbar k>`` with every field mode in vacuum."""
    s = model.space
    return s.product_state(basis(s.n_motion, s.momentum_index(n)))


def hot_momentum(space: HilbertSpace, omega_rec: float, e_kin: float) -> int:
    """Allowed momentum whose kinetic energy ``omega_rec n**2`` is closest to ``e_kin``."""
    n = space.momenta
    return int(n[np.argmin(np.abs(omega_rec * n**2 - e_kin) + 1e-9 * (n < 0))])


def trap_level_state(model: QuantumModel, level: int, parity: int | None = None) -> np.ndarray:
    """Lattice-well eigenstate of band ``level`` with every field mode in vacuum."""
    s = model.space
    n = s.momenta
    e, v, band = trap_eigenbasis(s, model.params.omega_rec, model.params.u0 * model.alpha**2)
    mask = band == level
    if parity is not None:
        mask &= np.array([np.any(n[np.abs(v[:, i]) > 0] % 2 == parity) for i in range(len(n))])
    cols = np.nonzero(mask)[0]
    if cols.size == 0:
        raise ValueError(f"no trap level {level} in this basis")
    return s.product_state(v[:, cols[0]])
