"""Exact dense density-matrix simulation for small registers.

Qubit 0 is the most significant bit of a computational-basis index, which
matches ``np.kron`` ordering: ``kron(A, B)`` acts with ``A`` on qubit 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from . import kernels
from .distributions import DiscreteDistribution
from .errors import ChannelError, DimensionError, InvalidStateError, NormalizationError
from .rng import stream

MAX_QUBITS = 10
ATOL = 1e-10

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def _check_square(m: np.ndarray, what: str) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{what} must be a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    if dim > 2**MAX_QUBITS:
        raise DimensionError(f"{what} dimension {dim} exceeds the {MAX_QUBITS}-qubit register cap")
    return dim


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite register state."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        _check_square(m, "density matrix")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > ATOL:
            raise InvalidStateError(f"density matrix is not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise InvalidStateError(f"density matrix trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -ATOL:
            raise InvalidStateError(f"density matrix has negative eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.dim)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)


@dataclass(frozen=True)
class UnitaryMatrix:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        dim = _check_square(m, "unitary")
        dev = np.max(np.abs(m.conj().T @ m - np.eye(dim)))
        if dev > ATOL:
            raise ChannelError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class QuantumChannel:
    """Trace-preserving channel given by Kraus operators, shape (K, N, N)."""

    kraus_ops: np.ndarray = field(repr=False)

    def __post_init__(self):
        ops = _frozen(np.asarray(self.kraus_ops))
        if ops.ndim == 2:
            ops = _frozen(ops[None])
        if ops.ndim != 3 or ops.shape[0] == 0 or ops.shape[1] != ops.shape[2]:
            raise ChannelError(f"Kraus operators must have shape (K, N, N), got {ops.shape}")
        object.__setattr__(self, "kraus_ops", ops)
        dim = _check_square(ops[0], "Kraus operator")
        completeness = np.einsum("kji,kjl->il", ops.conj(), ops)
        dev = np.max(np.abs(completeness - np.eye(dim)))
        if dev > ATOL:
            raise ChannelError(f"Kraus completeness violated (max |sum M^dag M - I| = {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.kraus_ops.shape[1]

    @classmethod
    def identity(cls, dim: int) -> "QuantumChannel":
        return cls(np.eye(dim)[None])

    @classmethod
    def from_unitary(cls, u: UnitaryMatrix) -> "QuantumChannel":
        return cls(u.matrix[None])


@dataclass(frozen=True)
class Observable:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        _check_square(m, "observable")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > ATOL:
            raise InvalidStateError(f"observable is not Hermitian (max deviation {herm:.3e})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigh[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        """Columns are orthonormal eigenvectors, aligned with ``eigenvalues``."""
        return self._eigh[1]

    def spectral_projectors(self, decimals: int = 9) -> list[tuple[float, np.ndarray]]:
        """Distinct eigenvalues m with their projectors Pi_m (degenerate ones merged)."""
        vals, vecs = self._eigh
        keys = np.round(vals, decimals)
        out = []
        for m in np.unique(keys):
            cols = vecs[:, keys == m]
            out.append((float(vals[keys == m].mean()), cols @ cols.conj().T))
        return out

    @property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.matrix == np.diag(np.diag(self.matrix))))


def _check_dims(a, b):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def pure_state(amplitudes: Sequence[complex]) -> DensityMatrix:
    """Density matrix |psi><psi| of a normalized amplitude vector."""
    psi = np.asarray(amplitudes, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > ATOL:
        raise NormalizationError(f"amplitude vector has norm {norm!r}, expected 1")
    return DensityMatrix(np.outer(psi, psi.conj()))


def basis_state(bits: str) -> DensityMatrix:
    """Computational basis projector for a bitstring such as ``"101"``."""
    psi = np.zeros(2 ** len(bits))
    psi[int(bits, 2)] = 1.0
    return pure_state(psi)


def evolve(state: DensityMatrix, u: UnitaryMatrix) -> DensityMatrix:
    _check_dims(state, u)
    m = u.matrix @ state.matrix @ u.matrix.conj().T
    return DensityMatrix(0.5 * (m + m.conj().T))


def apply_channel(state: DensityMatrix, ch: QuantumChannel) -> DensityMatrix:
    """rho' = sum_k M_k rho M_k^dagger."""
    _check_dims(state, ch)
    m = kernels.kraus_apply(state.matrix, ch.kraus_ops)
    return DensityMatrix(0.5 * (m + m.conj().T))


def depolarizing(e: float, allow_unphysical: bool = False) -> QuantumChannel:
    """Single-qubit depolarizing channel with error probability ``e``.

    Kraus operators are sqrt(1-e) I and sqrt(e/3) times X, Y, Z. ``e`` is
    restricted to [0, 3/4]; values up to 1 need ``allow_unphysical``.
    """
    e = float(e)
    if not 0.0 <= e <= 1.0:
        raise ChannelError(f"depolarizing parameter e={e} outside [0, 1]")
    if e > 0.75 and not allow_unphysical:
        raise ChannelError(f"depolarizing parameter e={e} exceeds 3/4; pass allow_unphysical=True")
    if e == 0.0:
        return QuantumChannel(I2[None])
    w = np.sqrt(e / 3.0)
    return QuantumChannel(np.stack([np.sqrt(1.0 - e) * I2, w * X, w * Y, w * Z]))


def lift_single_qubit_channel(ch: QuantumChannel, target: int, n: int) -> QuantumChannel:
    """Embed a 2x2-Kraus channel on qubit ``target`` of an ``n``-qubit register."""
    if ch.dim != 2:
        raise DimensionError(f"expected a single-qubit channel, got dimension {ch.dim}")
    if not 0 <= target < n:
        raise DimensionError(f"target qubit {target} out of range for {n} qubits")
    if n > MAX_QUBITS:
        raise DimensionError(f"{n} qubits exceeds the register cap of {MAX_QUBITS}")
    left = np.eye(2**target)
    right = np.eye(2 ** (n - target - 1))
    return QuantumChannel(np.stack([np.kron(np.kron(left, k), right) for k in ch.kraus_ops]))


def depolarize_each_qubit(state: DensityMatrix, e: float) -> DensityMatrix:
    """Apply depolarizing(e) to every qubit through the generic Kraus path."""
    n = state.n_qubits
    ch1 = depolarizing(e)
    for q in range(n):
        state = apply_channel(state, lift_single_qubit_channel(ch1, q, n))
    return state


def measure_distribution(state: DensityMatrix) -> DiscreteDistribution:
    """Computational-basis outcome probabilities p_i = <i|rho|i>."""
    return DiscreteDistribution.from_raw(np.diag(state.matrix).real)


def expectation(state: DensityMatrix, obs: Observable) -> float:
    """Tr[O rho]."""
    _check_dims(state, obs)
    val = np.einsum("ij,ji->", obs.matrix, state.matrix)
    if abs(val.imag) > ATOL:
        raise InvalidStateError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def sample_counts(dist: DiscreteDistribution, shots: int, seed: int) -> np.ndarray:
    """Multinomial outcome counts for ``shots`` measurements."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    return stream(seed).multinomial(int(shots), dist.probs)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def pauli_z(target: int = 0, n: int = 1) -> Observable:
    mats = [I2] * n
    mats[target] = Z
    return Observable(kron_all(mats))


def readout_z(target: int = 0, n: int = 1) -> Observable:
    """Diagonal observable -p0 + p1 on one qubit: eigenvalue +1 on |1>, -1 on |0>.

    This is the sign convention under which a depolarized qubit gives
    <Z> = (2|beta|^2 - 1)(1 - 4e/3); it is -1 times :func:`pauli_z`.
    """
    mats = [I2] * n
    mats[target] = -Z
    return Observable(kron_all(mats))


def bernstein_vazirani_unitary(secret: str) -> UnitaryMatrix:
    """Data-register unitary of the Bernstein-Vazirani circuit for ``secret``.

    The oracle is built on n data qubits plus an ancilla (qubit n) as CNOTs
    from each secret-bit qubit into the ancilla. With the ancilla prepared
    in |->, the oracle kicks back the phase (-1)^(s.x); projecting the
    ancilla onto |-> recovers that diagonal exactly. The returned unitary is
    H^n . phase . H^n on the data register alone.
    """
    if not secret or set(secret) - {"0", "1"}:
        raise ValueError(f"secret must be a non-empty bitstring, got {secret!r}")
    n = len(secret)
    if n + 1 > MAX_QUBITS:
        raise DimensionError(f"secret of length {n} plus ancilla exceeds the register cap")
    dim = 2**n
    oracle = np.zeros((2 * dim, 2 * dim), dtype=np.complex128)
    s = int(secret, 2)
    for x in range(dim):
        parity = bin(x & s).count("1") & 1
        for a in (0, 1):
            oracle[2 * x + (a ^ parity), 2 * x + a] = 1.0
    minus = np.array([1, -1], dtype=np.complex128) / np.sqrt(2)
    proj = np.kron(np.eye(dim), minus[:, None])  # data -> data (x) |->
    phase = proj.conj().T @ oracle @ proj
    hn = kron_all([H] * n)
    return UnitaryMatrix(hn @ phase @ hn)
