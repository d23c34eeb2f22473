"""Numba-compiled inner loops: word-packed elimination and sampler steps.

Everything here operates on (rows, words) uint64 arrays with bit j of a row
at word j // 64, position j % 64.  These are the only loops that matter for
the large statistical sweeps; all public semantics live in gf2/stabilizer.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True, inline="always")
def _swap_xz(x):
    return ((x & _M1) << _ONE) | ((x >> _ONE) & _M1)


@njit(cache=True)
def forward_eliminate(words, col_limit):
    """In-place row echelon form over the first col_limit columns.

    Returns the rank; rows below it are zero in those columns.
    """
    m, nw = words.shape
    r = 0
    for col in range(col_limit):
        wd = col >> 6
        bit = np.uint64(col & 63)
        p = -1
        for i in range(r, m):
            if (words[i, wd] >> bit) & _ONE:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                tmp = words[r, k]
                words[r, k] = words[p, k]
                words[p, k] = tmp
        for i in range(r + 1, m):
            if (words[i, wd] >> bit) & _ONE:
                for k in range(nw):
                    words[i, k] ^= words[r, k]
        r += 1
        if r == m:
            break
    return r


@njit(cache=True)
def xor_select(rows, m, coeff, out):
    """out = XOR of rows[i] for i < m with coeff[i] set."""
    nw = rows.shape[1]
    for k in range(nw):
        out[k] = np.uint64(0)
    for i in range(m):
        if coeff[i]:
            for k in range(nw):
                out[k] ^= rows[i, k]


@njit(cache=True, inline="always")
def _omega(row, jv, nw):
    acc = np.uint64(0)
    for k in range(nw):
        acc ^= row[k] & jv[k]
    return _popcount(acc) & _ONE


@njit(cache=True)
def split_step(rows, m, coeff, w, u_out):
    """Remove the hyperbolic pair (w, u) from the basis rows[:m].

    w must be the combination of rows[:m] selected by coeff; u is the first
    basis row anticommuting with w and is written to u_out.  Remaining rows
    are corrected to span the symplectic complement of <w, u> and compacted
    to rows[:m-2].  Returns the new row count.
    """
    nw = rows.shape[1]
    jw = np.empty(nw, dtype=np.uint64)
    for k in range(nw):
        jw[k] = _swap_xz(w[k])
    u_idx = -1
    for i in range(m):
        if _omega(rows[i], jw, nw):
            u_idx = i
            break
    for k in range(nw):
        u_out[k] = rows[u_idx, k]
    ju = np.empty(nw, dtype=np.uint64)
    for k in range(nw):
        ju[k] = _swap_xz(u_out[k])
    # A coefficient row other than u (exists: w == u would give omega 0).
    r_idx = -1
    for i in range(m):
        if coeff[i] and i != u_idx:
            r_idx = i
            break
    for i in range(m):
        if i == u_idx or i == r_idx:
            continue
        ou = _omega(rows[i], ju, nw)
        ow = _omega(rows[i], jw, nw)
        if ou:
            for k in range(nw):
                rows[i, k] ^= w[k]
        if ow:
            for k in range(nw):
                rows[i, k] ^= u_out[k]
    # Compact the two freed slots with surviving tail rows.
    last = m - 1
    second = m - 2
    new_m = m - 2
    lo = u_idx if u_idx < r_idx else r_idx
    hi = r_idx if u_idx < r_idx else u_idx
    if lo < second:
        src = second if hi == last else last
        if hi < second:
            for k in range(nw):
                rows[lo, k] = rows[second, k]
                rows[hi, k] = rows[last, k]
        else:
            for k in range(nw):
                rows[lo, k] = rows[src, k]
    return new_m


@njit(cache=True)
def orthogonalize(rows, m, v, partner):
    """rows[i] ^= omega(rows[i], v) * partner for the active rows."""
    nw = rows.shape[1]
    jv = np.empty(nw, dtype=np.uint64)
    for k in range(nw):
        jv[k] = _swap_xz(v[k])
    for i in range(m):
        if _omega(rows[i], jv, nw):
            for k in range(nw):
                rows[i, k] ^= partner[k]
