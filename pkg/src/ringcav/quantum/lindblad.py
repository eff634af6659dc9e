"""Dense density-matrix evolution, used as an oracle for the trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import spsolve

from ..errors import DimensionGuardError, IntegrationError
from .model import QuantumModel
from .observables import expectation_rho

MAX_EVOLVE_DIM = 400
MAX_STEADY_DIM = 250


@dataclass
class LindbladSeries:
    times: np.ndarray
    observables: dict
    trace: np.ndarray
    rho_final: np.ndarray


def _dense_ops(model: QuantumModel):
    h = model.hamiltonian.toarray()
    cs = [j.op.toarray() for j in model.jump_ops]
    cdc = sum(c.conj().T @ c for c in cs)
    return h, cs, cdc


def lindblad_rhs(rho, h, cs, cdc):
    """``-i[H, rho] + sum_k C rho C^+ - (1/2){C^+ C, rho}`` for collapse operators C."""
    out = -1j * (h @ rho - rho @ h) - 0.5 * (cdc @ rho + rho @ cdc)
    for c in cs:
        out += c @ rho @ c.conj().T
    return out


def _check_rho(rho, dim):
    if rho.shape != (dim, dim):
        raise ValueError(f"rho0 must be {dim}x{dim}")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValueError("rho0 must have unit trace")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
        raise ValueError("rho0 must be hermitian")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("rho0 must be positive semidefinite")


def lindblad_evolve(model: QuantumModel, rho0, t_max: float, n_samples: int = 101,
                    rtol: float = 1e-10, atol: float = 1e-12,
                    max_dim: int = MAX_EVOLVE_DIM) -> LindbladSeries:
    """Integrate the master equation and sample the model observables.

    ``rho0`` may also be a state vector.  The state is re-symmetrized after
    every sample interval.

    Raises
    ------
    DimensionGuardError
        If the model dimension exceeds ``max_dim``.
    """
    dim = model.dim
    if dim > max_dim:
        raise DimensionGuardError(f"dimension {dim} exceeds the dense-oracle limit {max_dim}")
    rho = np.asarray(rho0, complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    _check_rho(rho, dim)
    h, cs, cdc = _dense_ops(model)

    def f(t, y):
        return lindblad_rhs(y.reshape(dim, dim), h, cs, cdc).ravel()

    times = np.linspace(0.0, t_max, n_samples)
    rhos = np.empty((n_samples, dim, dim), complex)
    rhos[0] = rho
    for i in range(1, n_samples):
        sol = solve_ivp(f, (times[i - 1], times[i]), rho.ravel(), method="DOP853",
                        rtol=rtol, atol=atol)
        if sol.status != 0:
            raise IntegrationError(f"master equation failed: {sol.message}", float(sol.t[-1]))
        rho = sol.y[:, -1].reshape(dim, dim)
        rho = 0.5 * (rho + rho.conj().T)
        rhos[i] = rho
    trace = np.einsum("tii->t", rhos).real
    return LindbladSeries(times, expectation_rho(model, rhos), trace, rho)


def liouvillian(model: QuantumModel) -> sp.csr_matrix:
    """Sparse superoperator acting on row-major ``rho.ravel()``.

    Uses ``vec(A rho B) = (A kron B^T) vec(rho)`` for the row-major layout.
    """
    h = sp.csr_matrix(model.hamiltonian)
    cs = [sp.csr_matrix(j.op) for j in model.jump_ops]
    cdc = sum((c.conj().T @ c for c in cs), sp.csr_matrix(h.shape, dtype=complex))
    eye = sp.identity(model.dim, dtype=complex, format="csr")
    L = -1j * (sp.kron(h, eye) - sp.kron(eye, h.T))
    L = L - 0.5 * (sp.kron(cdc, eye) + sp.kron(eye, cdc.T))
    for c in cs:
        L = L + sp.kron(c, c.conj())
    return sp.csr_matrix(L)


def lindblad_steady_state(model: QuantumModel, max_dim: int = MAX_STEADY_DIM) -> np.ndarray:
    """Unit-trace null vector of the Liouvillian (sparse LU solve).

    One row of the singular system is replaced by the trace condition.
    """
    dim = model.dim
    if dim > max_dim:
        raise DimensionGuardError(f"dimension {dim} exceeds the steady-state limit {max_dim}")
    L = liouvillian(model).tolil()
    L[0, :] = np.eye(dim).ravel()
    rhs = np.zeros(dim * dim, complex)
    rhs[0] = 1.0
    rho = spsolve(L.tocsc(), rhs).reshape(dim, dim)
    return 0.5 * (rho + rho.conj().T)
