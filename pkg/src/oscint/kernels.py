"""Inner loops: determinant scan, tridiagonal solve, compensated sums.

Each kernel has a numba version (``*_jit``) and a fallback (``*_np``); the
unsuffixed names are bound according to :data:`oscint._accel.BACKEND`.

The determinant recursions are advanced in difference form::

    delta_j = delta_{j-1} - e * D_{j-1}
    D_j     = D_{j-1} + delta_j
    S_j     = S_{j-1} + (D_j - e * S_{j-1})

which is algebraically the three-term recursion
``D_j = (2 - e) D_{j-1} - D_{j-2}`` but never forms ``2 - e``; at
n = 1e6 the rounded coefficient would keep only ~4 digits of e.
"""
import math

import numpy as np
import scipy.linalg

from ._accel import BACKEND, jit

_BLOCK = 1024


def _det_scan_py(n, e, store):
    D = 1.0
    d_c = 0.0
    delta = -e
    S = 2.0 - e
    s_c = 0.0
    S_prev = 1.0
    D_arr = np.empty(n if store else 0)
    if store:
        D_arr[0] = 1.0
    for j in range(2, n + 1):
        if j > 2:
            delta = delta - e * (D - d_c)
        # Kahan step; the running value is D - d_c
        y = delta - d_c
        tmp = D + y
        d_c = (tmp - D) - y
        D = tmp
        S_prev = S - s_c
        inc = (D - d_c) - e * S_prev
        y = inc - s_c
        tmp = S + y
        s_c = (tmp - S) - y
        S = tmp
        if store:
            D_arr[j - 1] = D - d_c
    D_n = D - d_c
    S_n = S - s_c
    return D_n, S_n, S_prev, D_n - e * S_prev, D_arr


_det_scan_jit = jit(_det_scan_py)


def _det_scan_np(n, e, store):
    """Blocked evaluation of the same linear recursion.

    The state ``(D, delta, S)`` evolves by a fixed 3x3 map; its first
    ``_BLOCK`` powers are generated once with scalar steps and then applied
    block-by-block as one matrix product each. Short scans, where building
    the powers would cost more than the scan, use the scalar loop.
    """
    if n <= _BLOCK:
        return _det_scan_py(n, e, store)
    # responses of the step map to unit states, for k = 1.._BLOCK steps
    basis = np.eye(3)
    resp = np.empty((_BLOCK, 3, 3))
    cols = [list(basis[:, i]) for i in range(3)]
    for k in range(_BLOCK):
        for c in cols:
            D, delta, S = c
            delta = delta - e * D
            D = D + delta
            S = S + (D - e * S)
            c[0], c[1], c[2] = D, delta, S
        resp[k] = np.array(cols).T
    # state after j = 2 (delta_2 = -e, D_2 = 1 - e)
    state = np.array([1.0 - e, -e, (1.0 - e) + (1.0 - e) * (2.0 - e)])
    steps = n - 2
    out = np.empty((steps, 3))
    done = 0
    while done < steps:
        k = min(_BLOCK, steps - done)
        out[done:done + k] = resp[:k] @ state
        state = out[done + k - 1]
        done += k
    if steps:
        D_n, S_n = out[-1, 0], out[-1, 2]
        S_prev = out[-2, 2] if steps > 1 else (1.0 - e) * (3.0 - e)
    else:
        D_n, S_n, S_prev = 1.0 - e, (1.0 - e) * (3.0 - e), 2.0 - e
    if store:
        D_arr = np.empty(n)
        D_arr[0], D_arr[1] = 1.0, 1.0 - e
        D_arr[2:] = out[:, 0]
    else:
        D_arr = np.empty(0)
    D_n, S_n, S_prev = float(D_n), float(S_n), float(S_prev)
    return D_n, S_n, S_prev, D_n - e * S_prev, D_arr


def _solve_py(e, rhs):
    # Thomas elimination for tridiag(-1, 2 - e, -1) with pivots kept as
    # g_i = d_i - 1, which is O(1/i) and would otherwise cancel.
    n = rhs.shape[0]
    g = np.empty(n)
    z = np.empty(n)
    gi = 1.0 - e
    di = 1.0 + gi
    if di == 0.0:
        return z, False
    g[0] = gi
    z[0] = rhs[0] / di
    for i in range(1, n):
        gi = gi / (1.0 + gi) - e
        di = 1.0 + gi
        if di == 0.0:
            return z, False
        g[i] = gi
        z[i] = (rhs[i] + z[i - 1]) / di
    x = z
    for i in range(n - 2, -1, -1):
        x[i] = z[i] + x[i + 1] / (1.0 + g[i])
    return x, True


_solve_jit = jit(_solve_py)


def _solve_np(e, rhs):
    n = rhs.shape[0]
    ab = np.full((3, n), -1.0)
    ab[1, :] = 2.0 - e
    try:
        # n = 1 divides directly; a zero pivot is reported through ok
        with np.errstate(divide="ignore", invalid="ignore"):
            x = scipy.linalg.solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError:
        return np.zeros(n), False
    return x, bool(np.all(np.isfinite(x)))


def _neumaier_sum_py(x):
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


_neumaier_sum_jit = jit(_neumaier_sum_py)


def _fsum_np(x):
    return math.fsum(np.asarray(x, dtype=float))


def _cos_riemann_py(lam, t, n):
    s = 0.0
    c = 0.0
    h = t / n
    for m in range(1, n + 1):
        v = h * math.cos(m * lam * t / n)
        tt = s + v
        if abs(s) >= abs(v):
            c += (s - tt) + v
        else:
            c += (v - tt) + s
        s = tt
    return s + c


_cos_riemann_jit = jit(_cos_riemann_py)


def _cos_riemann_np(lam, t, n):
    m = np.arange(1, n + 1, dtype=float)
    return math.fsum((t / n) * np.cos(m * lam * t / n))


if BACKEND == "numba":
    det_scan = _det_scan_jit
    solve_sym_tridiag = _solve_jit
    compensated_sum = _neumaier_sum_jit
    cos_riemann = _cos_riemann_jit
else:
    det_scan = _det_scan_np
    solve_sym_tridiag = _solve_np
    compensated_sum = _fsum_np
    cos_riemann = _cos_riemann_np
