# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Fock-space kernels.

Occupation masks use bit ``k`` for site ``k``. Basis states are
``(c_0^+)^{n_0} (c_1^+)^{n_1} ... |0>``, so moving an operator onto site ``k``
picks up ``jw_sign`` once per occupied site with a smaller index.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_clzll(unsigned long long) nogil


cdef inline int _clz(uint64_t x) noexcept nogil:
    return 64 if x == 0 else __builtin_clzll(x)


cdef inline int _parity(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x) & 1


cdef inline Py_ssize_t _find(const int64_t[::1] masks, int64_t target) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = masks.shape[0] - 1, mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if masks[mid] < target:
            lo = mid + 1
        elif masks[mid] > target:
            hi = mid - 1
        else:
            return mid
    return -1


# Largest site count for which a dense mask -> index table is built.
cdef int TABLE_MAX_SITES = 22


cdef object _lookup_table(const int64_t[::1] masks, int nsites):
    """Dense ``mask -> index`` array (``-1`` where absent), or ``None`` if too large."""
    if nsites > TABLE_MAX_SITES or ((<Py_ssize_t>1) << nsites) > 64 * masks.shape[0] + 4096:
        return None
    cdef cnp.ndarray[cnp.int32_t, ndim=1] arr = np.full((<Py_ssize_t>1) << nsites, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] t = arr
    cdef Py_ssize_t k
    for k in range(masks.shape[0]):
        t[masks[k]] = <cnp.int32_t>k
    return arr


cdef inline uint64_t _between(int i, int j) noexcept nogil:
    cdef int lo = i if i < j else j
    cdef int hi = j if i < j else i
    return ((<uint64_t>1 << hi) - 1) & ~((<uint64_t>1 << (lo + 1)) - 1)


def apply_creation(const double[::1] state, const double[::1] coeffs, int nsites, int jw_sign):
    """Apply ``sum_i coeffs[i] c_i^+`` to a full Fock-space vector."""
    cdef Py_ssize_t dim = state.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(dim, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t s
    cdef int i
    cdef uint64_t bit
    cdef double amp, c
    with nogil:
        for s in range(dim):
            amp = state[s]
            if amp == 0.0:
                continue
            for i in range(nsites):
                bit = (<uint64_t>1) << i
                if (<uint64_t>s) & bit:
                    continue
                c = coeffs[i]
                if c == 0.0:
                    continue
                if jw_sign < 0 and _parity((<uint64_t>s) & (bit - 1)):
                    out[s | bit] -= c * amp
                else:
                    out[s | bit] += c * amp
    return out_arr


def reorder_signs(int nsites, int64_t sub_mask, int jw_sign):
    """Sign of each basis state after moving the ``sub_mask`` modes to the front.

    Relative order inside the subsystem and inside its complement is kept.
    """
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << nsites
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out_arr = np.ones(dim, dtype=np.int8)
    cdef cnp.int8_t[::1] out = out_arr
    cdef uint64_t full = ((<uint64_t>1) << nsites) - 1
    cdef uint64_t amask = <uint64_t>sub_mask
    cdef uint64_t bmask = full & ~amask
    cdef Py_ssize_t s
    cdef int a, count
    cdef uint64_t occ_b
    if jw_sign > 0:
        return out_arr
    with nogil:
        for s in range(dim):
            occ_b = (<uint64_t>s) & bmask
            if occ_b == 0:
                continue
            count = 0
            for a in range(nsites):
                if (amask >> a) & 1 and ((<uint64_t>s) >> a) & 1:
                    count += __builtin_popcountll(occ_b & (((<uint64_t>1) << a) - 1))
            if count & 1:
                out[s] = -1
    return out_arr


def sector_hopping(const int64_t[::1] masks, int i, int j, int jw_sign):
    """Nonzero entries ``(rows, cols, vals)`` of ``c_i^+ c_j`` inside a sector."""
    cdef Py_ssize_t dim = masks.shape[0]
    cdef int nsites = 1 + max(i, j)
    if dim:
        nsites = max(nsites, 64 - _clz(<uint64_t>masks[dim - 1]))
    table_obj = _lookup_table(masks, nsites)
    cdef bint use_table = table_obj is not None
    cdef cnp.int32_t[::1] table
    if use_table:
        table = table_obj
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rows_arr = np.empty(dim, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cols_arr = np.empty(dim, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals_arr = np.empty(dim, dtype=np.float64)
    cdef int64_t[::1] rows = rows_arr
    cdef int64_t[::1] cols = cols_arr
    cdef double[::1] vals = vals_arr
    cdef uint64_t bi = (<uint64_t>1) << i
    cdef uint64_t bj = (<uint64_t>1) << j
    cdef uint64_t between = _between(i, j)
    cdef Py_ssize_t k, idx, nnz = 0
    cdef uint64_t s, t
    with nogil:
        for k in range(dim):
            s = <uint64_t>masks[k]
            if not (s & bj):
                continue
            if i == j:
                rows[nnz] = k
                cols[nnz] = k
                vals[nnz] = 1.0
                nnz += 1
                continue
            if s & bi:
                continue
            t = (s & ~bj) | bi
            idx = table[t] if use_table else _find(masks, <int64_t>t)
            rows[nnz] = idx
            cols[nnz] = k
            vals[nnz] = -1.0 if (jw_sign < 0 and _parity(s & between)) else 1.0
            nnz += 1
    if nnz == dim:
        return rows_arr, cols_arr, vals_arr
    return rows_arr[:nnz].copy(), cols_arr[:nnz].copy(), vals_arr[:nnz].copy()


def sector_correlation(const int64_t[::1] masks, const double[::1] psi, int nsites, int jw_sign):
    """``C[i, j] = <psi| c_i^+ c_j |psi>`` for a real sector vector."""
    cdef Py_ssize_t dim = masks.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c_arr = np.zeros((nsites, nsites), dtype=np.float64)
    cdef double[:, ::1] c = c_arr
    cdef Py_ssize_t k, idx
    cdef int i, j
    cdef uint64_t s, t, bi, bj
    cdef double p, w
    table_obj = _lookup_table(masks, nsites)
    cdef bint use_table = table_obj is not None
    cdef cnp.int32_t[::1] table
    if use_table:
        table = table_obj
    with nogil:
        for k in range(dim):
            p = psi[k]
            if p == 0.0:
                continue
            s = <uint64_t>masks[k]
            for j in range(nsites):
                bj = (<uint64_t>1) << j
                if not (s & bj):
                    continue
                c[j, j] += p * p
                for i in range(nsites):
                    bi = (<uint64_t>1) << i
                    if s & bi:
                        continue
                    t = (s & ~bj) | bi
                    idx = table[t] if use_table else _find(masks, <int64_t>t)
                    w = psi[idx] * p
                    if jw_sign < 0 and _parity(s & _between(i, j)):
                        c[i, j] -= w
                    else:
                        c[i, j] += w
    return c_arr
