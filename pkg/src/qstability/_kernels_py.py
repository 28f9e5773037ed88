"""Pure numpy implementations of the compiled kernels.

Used when the Cython extension is not built or when
``QSTABILITY_PURE_PYTHON=1`` is set.
"""
from __future__ import annotations

import numpy as np


def kraus_apply(rho: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """Return sum_k M_k rho M_k^dagger."""
    return np.einsum("kim,mn,kjn->ij", ops, rho, ops.conj(), optimize=True)


def _depolarize_inplace(r: np.ndarray, e: float, n_qubits: int) -> None:
    keep = 1.0 - 4.0 * e / 3.0
    mix = 2.0 * e / 3.0
    dim = r.shape[0]
    for q in range(n_qubits):
        left = 2**q
        right = dim // (2 * left)
        t = r.reshape(left, 2, right, left, 2, right)
        s = mix * (t[:, 0, :, :, 0, :] + t[:, 1, :, :, 1, :])
        t *= keep
        t[:, 0, :, :, 0, :] += s
        t[:, 1, :, :, 1, :] += s


def local_depolarize(rho: np.ndarray, e: float, n_qubits: int) -> np.ndarray:
    """Apply the single-qubit depolarizing channel to every qubit."""
    out = np.array(rho, dtype=np.complex128, copy=True)
    _depolarize_inplace(out, float(e), n_qubits)
    return out


def depolarized_probabilities(
    rho: np.ndarray,
    basis: np.ndarray,
    es: np.ndarray,
    n_qubits: int,
    computational: bool,
) -> np.ndarray:
    """Outcome probabilities in ``basis`` after local depolarizing at each e."""
    dim = rho.shape[0]
    out = np.empty((len(es), dim))
    work = np.empty_like(rho, dtype=np.complex128)
    for b, e in enumerate(es):
        work[...] = rho
        _depolarize_inplace(work, float(e), n_qubits)
        if computational:
            out[b] = work.diagonal().real
        else:
            out[b] = np.einsum("aj,ai,ij->j", basis.conj(), work, basis).real
    return out
