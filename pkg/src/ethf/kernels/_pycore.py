"""NumPy implementations of the Fock-space kernels.

Same signatures and conventions as the compiled ``_ccore`` module; used when
the extension is unavailable or ``ETHF_PURE_PYTHON=1`` is set.
"""
import numpy as np

if hasattr(np, "bitwise_count"):
    def _popcount(x):
        return np.bitwise_count(x).astype(np.int64)
else:  # numpy < 2.0
    def _popcount(x):
        x = np.asarray(x, dtype=np.uint64)
        out = np.zeros(x.shape, dtype=np.int64)
        while np.any(x):
            out += (x & np.uint64(1)).astype(np.int64)
            x = x >> np.uint64(1)
        return out


def _between(i, j):
    lo, hi = min(i, j), max(i, j)
    return ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)


def apply_creation(state, coeffs, nsites, jw_sign):
    state = np.ascontiguousarray(state, dtype=np.float64)
    dim = state.shape[0]
    s = np.arange(dim, dtype=np.int64)
    out = np.zeros(dim, dtype=np.float64)
    for i in range(nsites):
        c = coeffs[i]
        if c == 0.0:
            continue
        bit = 1 << i
        src = s[(s & bit) == 0]
        amp = state[src]
        if jw_sign < 0:
            amp = np.where(_popcount(src & (bit - 1)) & 1, -amp, amp)
        out[src | bit] += c * amp
    return out


def reorder_signs(nsites, sub_mask, jw_sign):
    dim = 1 << nsites
    if jw_sign > 0:
        return np.ones(dim, dtype=np.int8)
    s = np.arange(dim, dtype=np.int64)
    bmask = (dim - 1) & ~sub_mask
    occ_b = s & bmask
    count = np.zeros(dim, dtype=np.int64)
    for a in range(nsites):
        if (sub_mask >> a) & 1:
            count += ((s >> a) & 1) * _popcount(occ_b & ((1 << a) - 1))
    return np.where(count & 1, -1, 1).astype(np.int8)


def sector_hopping(masks, i, j, jw_sign):
    masks = np.asarray(masks, dtype=np.int64)
    bi, bj = 1 << i, 1 << j
    src = np.flatnonzero(masks & bj)
    if i == j:
        return src.copy(), src.copy(), np.ones(src.size)
    src = src[(masks[src] & bi) == 0]
    s = masks[src]
    rows = np.searchsorted(masks, (s & ~bj) | bi).astype(np.int64)
    vals = np.ones(src.size)
    if jw_sign < 0:
        vals[(_popcount(s & _between(i, j)) & 1) == 1] = -1.0
    return rows, src.astype(np.int64), vals


def sector_correlation(masks, psi, nsites, jw_sign):
    psi = np.asarray(psi, dtype=np.float64)
    c = np.zeros((nsites, nsites))
    for i in range(nsites):
        for j in range(nsites):
            rows, cols, vals = sector_hopping(masks, i, j, jw_sign)
            c[i, j] = np.dot(vals * psi[rows], psi[cols])
    return c
