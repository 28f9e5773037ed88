"""Kernel backend selection.

The compiled extension is used when importable; set
``QSTABILITY_PURE_PYTHON=1`` to force the numpy fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

# naive O(N^3) loops lose to BLAS above this dimension
_COMPILED_KRAUS_MAX_DIM = 16

if os.environ.get("QSTABILITY_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def kraus_apply(rho: np.ndarray, ops: np.ndarray) -> np.ndarray:
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    ops = np.ascontiguousarray(ops, dtype=np.complex128)
    if rho.shape[0] > _COMPILED_KRAUS_MAX_DIM:
        return _kernels_py.kraus_apply(rho, ops)
    return _impl.kraus_apply(rho, ops)


def local_depolarize(rho: np.ndarray, e: float, n_qubits: int) -> np.ndarray:
    return _impl.local_depolarize(np.ascontiguousarray(rho, dtype=np.complex128), float(e), n_qubits)


def depolarized_probabilities(
    rho: np.ndarray,
    basis: np.ndarray | None,
    es: np.ndarray,
    n_qubits: int,
) -> np.ndarray:
    """Probabilities over the columns of ``basis`` (computational basis if None)."""
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    es = np.ascontiguousarray(es, dtype=np.float64)
    computational = basis is None
    if computational:
        basis = np.eye(rho.shape[0], dtype=np.complex128)
    basis = np.ascontiguousarray(basis, dtype=np.complex128)
    return _impl.depolarized_probabilities(rho, basis, es, n_qubits, computational)
