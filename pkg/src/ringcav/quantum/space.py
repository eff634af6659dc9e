"""Truncated particle-field Hilbert space and its elementary operators.

The particle lives on a ring of one optical wavelength, so its momentum basis
is ``|n>`` with ``p = n hbar k``.  Every position dependence is through
``cos 2kx`` and ``sin 2kx``, which shift ``n`` by two; even and odd ``n`` never
mix, and a parity sector can be simulated on its own.

Tensor order is motion x sine mode x cosine mode (the last factor is absent
when the cosine mode is treated as a coherent field).  In the momentum basis::

    <n+2| cos2kx |n> = 1/2          <n-2| cos2kx |n> = 1/2
    <n+2| sin2kx |n> = -i/2         <n-2| sin2kx |n> = +i/2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

MIN_MOMENTUM_CUTOFF = 4
MIN_FOCK_CUTOFF = 2


@dataclass(frozen=True)
class HilbertSpace:
    """Cutoffs of the truncated space.

    ``n_fock_cos=None`` means the cosine mode is a classical coherent field.
    ``parity`` is ``"even"``, ``"odd"`` or ``None`` (both sectors).
    """

    n_mom: int = 16
    n_fock_sine: int = 6
    n_fock_cos: int | None = None
    parity: str | None = "even"

    def __post_init__(self):
        if self.n_mom < MIN_MOMENTUM_CUTOFF:
            raise ValueError(f"n_mom must be >= {MIN_MOMENTUM_CUTOFF}")
        if self.n_fock_sine < MIN_FOCK_CUTOFF:
            raise ValueError(f"n_fock_sine must be >= {MIN_FOCK_CUTOFF}")
        if self.n_fock_cos is not None and self.n_fock_cos < MIN_FOCK_CUTOFF:
            raise ValueError(f"n_fock_cos must be >= {MIN_FOCK_CUTOFF}")
        if self.parity not in ("even", "odd", None):
            raise ValueError(f"parity must be 'even', 'odd' or None, got {self.parity!r}")

    @property
    def momenta(self) -> np.ndarray:
        n = np.arange(-self.n_mom, self.n_mom + 1)
        if self.parity == "even":
            n = n[n % 2 == 0]
        elif self.parity == "odd":
            n = n[n % 2 != 0]
        return n

    @property
    def n_motion(self) -> int:
        return len(self.momenta)

    @property
    def n_sine(self) -> int:
        return self.n_fock_sine + 1

    @property
    def n_cos(self) -> int:
        return 1 if self.n_fock_cos is None else self.n_fock_cos + 1

    @property
    def dims(self) -> tuple:
        return (self.n_motion, self.n_sine, self.n_cos)

    @property
    def dim(self) -> int:
        return self.n_motion * self.n_sine * self.n_cos

    def to_dict(self) -> dict:
        return {"n_mom": self.n_mom, "n_fock_sine": self.n_fock_sine,
                "n_fock_cos": self.n_fock_cos, "parity": self.parity}

    # motional operators ------------------------------------------------
    def momentum_op(self) -> sp.csr_matrix:
        return sp.diags(self.momenta.astype(float)).tocsr()

    def _shift(self, step: int) -> sp.csr_matrix:
        """Matrix of ``|n + step><n|`` restricted to the basis."""
        n = self.momenta
        index = {int(v): i for i, v in enumerate(n)}
        rows, cols = [], []
        for i, v in enumerate(n):
            j = index.get(int(v) + step)
            if j is not None:
                rows.append(j)
                cols.append(i)
        m = len(n)
        return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))

    def cos2_op(self) -> sp.csr_matrix:
        return (0.5 * (self._shift(2) + self._shift(-2))).tocsr()

    def sin2_op(self) -> sp.csr_matrix:
        return ((-0.5j) * self._shift(2) + 0.5j * self._shift(-2)).tocsr()

    # field operators ---------------------------------------------------
    @staticmethod
    def destroy(n_levels: int) -> sp.csr_matrix:
        return sp.diags(np.sqrt(np.arange(1, n_levels)), 1).tocsr()

    def embed(self, motion=None, sine=None, cos=None) -> sp.csr_matrix:
        """Tensor product with identities filled in for missing factors."""
        ops = [
            sp.identity(self.n_motion) if motion is None else motion,
            sp.identity(self.n_sine) if sine is None else sine,
            sp.identity(self.n_cos) if cos is None else cos,
        ]
        out = ops[0]
        for op in ops[1:]:
            out = sp.kron(out, op)
        return sp.csr_matrix(out, dtype=complex)

    def product_state(self, motion, sine=None, cos=None) -> np.ndarray:
        """Normalized product state from per-factor amplitude vectors."""
        if sine is None:
            sine = basis(self.n_sine, 0)
        if cos is None:
            cos = basis(self.n_cos, 0)
        psi = np.kron(np.kron(np.asarray(motion, complex), sine), cos)
        return psi / np.linalg.norm(psi)

    def momentum_index(self, n: int) -> int:
        hits = np.nonzero(self.momenta == n)[0]
        if hits.size == 0:
            raise ValueError(f"momentum {n} is not in the basis {self.momenta[[0, -1]]} "
                             f"(parity={self.parity})")
        return int(hits[0])


def basis(n_levels: int, k: int) -> np.ndarray:
    v = np.zeros(n_levels, complex)
    v[k] = 1.0
    return v
