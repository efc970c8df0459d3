"""Hot loops for n-gram work.

Each kernel exists twice: ``*_numba`` (compiled with :func:`relent._accel.njit`)
and ``*_numpy`` (vectorised numpy or a plain Python loop). The public name is
bound to one of them according to :func:`relent._accel.backend`. Both paths
must return identical results for identical inputs; the test-suite checks it.

r-grams are encoded as base-``m`` integers, most significant symbol first, so
``code(x_1..x_r) = sum_k x_k m^(r-k)``. Callers guarantee ``m**r < 2**62``.
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit

MAX_CODE = 2**62


def gram_codes_numpy(data, r, m):
    data = np.asarray(data, dtype=np.int64)
    n = data.shape[0]
    count = n - r + 1
    codes = np.zeros(count, dtype=np.int64)
    for k in range(r):
        codes *= m
        codes += data[k:k + count]
    return codes


def _sample_chain_py(ctx_codes, cum_rows, ctx_cum, r, m, length, u_init, u_step, u_restart):
    out = np.empty(length, dtype=np.int64)
    mod = 1
    for _ in range(r):
        mod *= m
    restarts = 0

    # write a context drawn from the stationary weights, return its code
    def _draw_context(u, pos):
        j = np.searchsorted(ctx_cum, u * ctx_cum[-1], side="right")
        if j >= ctx_cum.shape[0]:
            j = ctx_cum.shape[0] - 1
        c = ctx_codes[j]
        rest = c
        for k in range(r - 1, -1, -1):
            if pos + k < length:
                out[pos + k] = rest % m
            rest //= m
        return c

    code = _draw_context(u_init, 0)
    pos = r
    while pos < length:
        idx = np.searchsorted(ctx_codes, code)
        if idx >= ctx_codes.shape[0] or ctx_codes[idx] != code:
            code = _draw_context(u_restart[restarts], pos)
            restarts += 1
            pos += r
            continue
        row = cum_rows[idx]
        sym = np.searchsorted(row, u_step[pos] * row[m - 1], side="right")
        if sym >= m:
            sym = m - 1
        out[pos] = sym
        code = (code * m + sym) % mod if r > 0 else 0
        pos += 1
    return out, restarts


@njit(cache=True)
def _gram_codes_nb(data, r, m):
    n = data.shape[0]
    out = np.empty(n - r + 1, dtype=np.int64)
    if r == 0:
        out[:] = 0
        return out
    lead = np.int64(1)  # weight of the leading symbol, m^(r-1)
    for _ in range(r - 1):
        lead *= m
    code = np.int64(0)
    for i in range(r):
        code = code * m + data[i]
    out[0] = code
    for i in range(r, n):
        code = (code - data[i - r] * lead) * m + data[i]
        out[i - r + 1] = code
    return out


@njit(cache=True)
def _draw_context_nb(ctx_codes, ctx_cum, r, m, length, u, pos, out):
    j = np.searchsorted(ctx_cum, u * ctx_cum[-1], side="right")
    if j >= ctx_cum.shape[0]:
        j = ctx_cum.shape[0] - 1
    c = ctx_codes[j]
    rest = c
    for k in range(r - 1, -1, -1):
        if pos + k < length:
            out[pos + k] = rest % m
        rest //= m
    return c


@njit(cache=True)
def _sample_chain_nb(ctx_codes, cum_rows, ctx_cum, r, m, length, u_init, u_step, u_restart):
    out = np.empty(length, dtype=np.int64)
    mod = np.int64(1)
    for _ in range(r):
        mod *= m
    restarts = 0
    code = _draw_context_nb(ctx_codes, ctx_cum, r, m, length, u_init, 0, out)
    pos = r
    while pos < length:
        idx = np.searchsorted(ctx_codes, code)
        if idx >= ctx_codes.shape[0] or ctx_codes[idx] != code:
            code = _draw_context_nb(ctx_codes, ctx_cum, r, m, length, u_restart[restarts], pos, out)
            restarts += 1
            pos += r
            continue
        row = cum_rows[idx]
        sym = np.searchsorted(row, u_step[pos] * row[m - 1], side="right")
        if sym >= m:
            sym = m - 1
        out[pos] = sym
        if r > 0:
            code = (code * m + sym) % mod
        pos += 1
    return out, restarts


def gram_codes_numba(data, r, m):
    if r <= 1:  # a plain copy; numpy is already memory-bound here
        return gram_codes_numpy(data, r, m)
    return _gram_codes_nb(np.ascontiguousarray(data, dtype=np.int64), int(r), int(m))


def sample_chain_numba(ctx_codes, cum_rows, ctx_cum, r, m, length, u_init, u_step, u_restart):
    out, restarts = _sample_chain_nb(
        np.ascontiguousarray(ctx_codes, dtype=np.int64),
        np.ascontiguousarray(cum_rows, dtype=np.float64),
        np.ascontiguousarray(ctx_cum, dtype=np.float64),
        int(r), int(m), int(length), float(u_init),
        np.ascontiguousarray(u_step, dtype=np.float64),
        np.ascontiguousarray(u_restart, dtype=np.float64),
    )
    return out, int(restarts)


def sample_chain_numpy(ctx_codes, cum_rows, ctx_cum, r, m, length, u_init, u_step, u_restart):
    out, restarts = _sample_chain_py(
        np.asarray(ctx_codes, dtype=np.int64),
        np.asarray(cum_rows, dtype=np.float64),
        np.asarray(ctx_cum, dtype=np.float64),
        int(r), int(m), int(length), float(u_init),
        np.asarray(u_step, dtype=np.float64),
        np.asarray(u_restart, dtype=np.float64),
    )
    return out, int(restarts)


if HAVE_NUMBA:
    gram_codes = gram_codes_numba
    sample_chain = sample_chain_numba
else:
    gram_codes = gram_codes_numpy
    sample_chain = sample_chain_numpy
