# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for small dense density matrices.

Same signatures and semantics as :mod:`qstability._kernels_py`.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def kraus_apply(const double complex[:, ::1] rho, const double complex[:, :, ::1] ops):
    """Return sum_k M_k rho M_k^dagger."""
    cdef Py_ssize_t n_ops = ops.shape[0]
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t k, i, j, m
    cdef double complex acc
    out_arr = np.zeros((dim, dim), dtype=np.complex128)
    tmp_arr = np.empty((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[:, ::1] tmp = tmp_arr
    with nogil:
        for k in range(n_ops):
            for i in range(dim):
                for j in range(dim):
                    acc = 0
                    for m in range(dim):
                        acc = acc + ops[k, i, m] * rho[m, j]
                    tmp[i, j] = acc
            for i in range(dim):
                for j in range(dim):
                    acc = 0
                    for m in range(dim):
                        acc = acc + tmp[i, m] * (ops[k, j, m].real - 1j * ops[k, j, m].imag)
                    out[i, j] = out[i, j] + acc
    return out_arr


cdef void _depolarize_inplace(double complex[:, ::1] r, double e, int n_qubits) noexcept nogil:
    # Pauli twirl on qubit q: rho -> (1 - 4e/3) rho + (2e/3) Tr_q(rho) (x) I_q
    cdef double keep = 1.0 - 4.0 * e / 3.0
    cdef double mix = 2.0 * e / 3.0
    cdef Py_ssize_t dim = r.shape[0]
    cdef Py_ssize_t bit, i0, j0, i1, j1
    cdef double complex s
    cdef int q
    for q in range(n_qubits):
        bit = (<Py_ssize_t> 1) << (n_qubits - 1 - q)
        for i0 in range(dim):
            if i0 & bit:
                continue
            i1 = i0 | bit
            for j0 in range(dim):
                if j0 & bit:
                    continue
                j1 = j0 | bit
                s = mix * (r[i0, j0] + r[i1, j1])
                r[i0, j0] = keep * r[i0, j0] + s
                r[i1, j1] = keep * r[i1, j1] + s
                r[i0, j1] = keep * r[i0, j1]
                r[i1, j0] = keep * r[i1, j0]


def local_depolarize(const double complex[:, ::1] rho, double e, int n_qubits):
    """Apply the single-qubit depolarizing channel to every qubit."""
    out_arr = np.array(rho, dtype=np.complex128, copy=True)
    cdef double complex[:, ::1] out = out_arr
    with nogil:
        _depolarize_inplace(out, e, n_qubits)
    return out_arr


def depolarized_probabilities(
    const double complex[:, ::1] rho,
    const double complex[:, ::1] basis,
    const double[::1] es,
    int n_qubits,
    bint computational,
):
    """Outcome probabilities in ``basis`` after local depolarizing at each e.

    Row b holds <v_j| E_{es[b]}(rho) |v_j> for the columns v_j of ``basis``.
    ``computational`` skips the basis change (basis is the identity).
    """
    cdef Py_ssize_t n_inst = es.shape[0]
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t b, i, j, a
    cdef double complex acc, inner
    out_arr = np.empty((n_inst, dim), dtype=np.float64)
    work_arr = np.empty((dim, dim), dtype=np.complex128)
    cdef double[:, ::1] out = out_arr
    cdef double complex[:, ::1] work = work_arr
    with nogil:
        for b in range(n_inst):
            for i in range(dim):
                for j in range(dim):
                    work[i, j] = rho[i, j]
            _depolarize_inplace(work, es[b], n_qubits)
            if computational:
                for j in range(dim):
                    out[b, j] = work[j, j].real
            else:
                for j in range(dim):
                    acc = 0
                    for a in range(dim):
                        inner = 0
                        for i in range(dim):
                            inner = inner + work[a, i] * basis[i, j]
                        acc = acc + (basis[a, j].real - 1j * basis[a, j].imag) * inner
                    out[b, j] = acc.real
    return out_arr
