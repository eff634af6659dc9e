"""Expectation values for pure-state snapshots and density matrices."""

from __future__ import annotations

import numpy as np

from .model import QuantumModel


def position_spread(cos2, sin2):
    """Position spread ``k*dx`` from the circular variance over the lambda/2 cell.

    With ``R = |<exp(2ikx)>|`` the circular variance is ``1 - R`` and
    ``k dx = sqrt((1 - R) / 2)``, which matches the ordinary standard deviation
    of ``kx`` for a well-localized state and saturates at ``1/sqrt(2)`` for a
    uniform one.
    """
    r = np.hypot(np.asarray(cos2, float), np.asarray(sin2, float))
    return np.sqrt(np.clip(1.0 - r, 0.0, None) / 2.0)


def _finish(values: dict) -> dict:
    values["dx"] = position_spread(values["cos2kx"], values["sin2kx"])
    return values


def expectation_states(model: QuantumModel, states) -> dict:
    """Observables for normalized states given as rows of ``states``."""
    s = np.atleast_2d(np.asarray(states, complex))
    out = {}
    for name, op in model.observables.items():
        out[name] = np.einsum("ti,ti->t", s.conj(), (op @ s.T).T).real
    return _finish(out)


def expectation_rho(model: QuantumModel, rhos) -> dict:
    """Observables for density matrices given as an ``(n, d, d)`` stack."""
    r = np.asarray(rhos, complex)
    if r.ndim == 2:
        r = r[None]
    out = {}
    for name, op in model.observables.items():
        dense = op.toarray()
        out[name] = np.einsum("ij,tji->t", dense, r).real
    return _finish(out)


def observables(state, model: QuantumModel) -> dict:
    """Observable set for one state vector or one density matrix, as floats."""
    a = np.asarray(state)
    vals = expectation_rho(model, a) if a.ndim == 2 else expectation_states(model, a)
    return {k: float(v[0]) for k, v in vals.items()}


def truncation_weights(model: QuantumModel, states) -> dict:
    """Largest population on the outermost momentum states and top sine-mode level."""
    s = np.atleast_2d(np.asarray(states, complex))
    nm, ns, nc = model.space.dims
    prob = (np.abs(s) ** 2).reshape(len(s), nm, ns, nc)
    edge = prob[:, [0, -1]].sum(axis=(1, 2, 3))
    top = prob[:, :, -1].sum(axis=(1, 2))
    out = {"momentum_edge": float(edge.max()), "sine_top": float(top.max())}
    if model.space.n_fock_cos is not None:
        out["cos_top"] = float(prob[..., -1].sum(axis=(1, 2)).max())
    return out
