"""Hot inner loops, each in a numba and a numpy/pure-Python flavour.

The public names (``lattice_series``, ``pair_clicks``, ``simplex_pivot_loop``)
dispatch to the numba build unless it is unavailable or disabled via
``DPRMP_DISABLE_NUMBA``. Both flavours are importable directly as
``*_py`` / ``*_nb`` for cross-checking and benchmarking.
"""
import numpy as np

from ._accel import HAVE_NUMBA, NUMBA_IMPORTABLE, njit

MAX_SERIES_TERMS = 100_000

# simplex status codes
OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def _lattice_series(x, D, p, q, m0, tol, min_terms, max_terms):
    # sum_{m >= m0, mD+q >= 0} x**(mD+p) / (mD+q)!
    m = m0
    while m * D + q < 0:
        m += 1
    n = m * D + p
    d = m * D + q
    term = 1.0
    for _ in range(n):
        term *= x
    for j in range(1, d + 1):
        term /= j
    total = term
    count = 1
    while count < max_terms:
        for j in range(1, D + 1):
            term *= x / (d + j)
        d += D
        total += term
        count += 1
        if count >= min_terms and abs(term) <= tol * abs(total):
            break
    return total, count


def _pair_clicks_loop(pos, l):
    n = pos.shape[0]
    first = np.empty(n // 2, dtype=np.int64)
    second = np.empty(n // 2, dtype=np.int64)
    npairs = 0
    pending = -1
    for i in range(n):
        if pending < 0:
            pending = i
        elif pos[i] - pos[pending] <= l:
            first[npairs] = pending
            second[npairs] = i
            npairs += 1
            pending = -1
        else:
            pending = i
    return first[:npairs], second[:npairs]


def pair_clicks_py(pos, l):
    """Greedy pairing of sorted click positions, vectorised.

    Clicks split into maximal runs whose consecutive gaps are <= l; inside a
    run the greedy rule pairs (0,1), (2,3), ... and drops an odd tail.
    """
    pos = np.asarray(pos, dtype=np.int64)
    n = pos.shape[0]
    if n < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()
    breaks = np.flatnonzero(np.diff(pos) > l) + 1
    starts = np.concatenate(([0], breaks))
    lengths = np.diff(np.concatenate((starts, [n])))
    seg = np.repeat(np.arange(starts.size), lengths)
    offset = np.arange(n) - starts[seg]
    lead = (offset % 2 == 0) & (offset + 1 < lengths[seg])
    first = np.flatnonzero(lead)
    return first, first + 1


def _simplex_loop_scalar(T, basis, tol, max_iter):
    # Bland's rule on a dense tableau; last row is the objective row,
    # last column the right-hand side.
    m = T.shape[0] - 1
    ncol = T.shape[1] - 1
    it = 0
    while it < max_iter:
        enter = -1
        for j in range(ncol):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, it
        leave = -1
        best = 0.0
        for i in range(m):
            a = T[i, enter]
            if a > tol:
                r = T[i, ncol] / a
                if leave < 0 or r < best - 1e-15 or (abs(r - best) <= 1e-15 and basis[i] < basis[leave]):
                    leave = i
                    best = r
        if leave < 0:
            return UNBOUNDED, it
        piv = T[leave, enter]
        for j in range(ncol + 1):
            T[leave, j] /= piv
        for i in range(m + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for j in range(ncol + 1):
                        T[i, j] -= f * T[leave, j]
        basis[leave] = enter
        it += 1
    return ITERATION_LIMIT, it


def simplex_pivot_loop_py(T, basis, tol, max_iter):
    """Bland's-rule pivoting with numpy row operations (in place)."""
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        neg = np.flatnonzero(T[m, :-1] < -tol)
        if neg.size == 0:
            return OPTIMAL, it
        enter = neg[0]
        col = T[:m, enter]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-15]
        leave = ties[np.argmin(basis[ties])]
        T[leave] /= T[leave, enter]
        f = T[:, enter].copy()
        f[leave] = 0.0
        T -= np.outer(f, T[leave])
        basis[leave] = enter
        it += 1
    return ITERATION_LIMIT, it


lattice_series_py = _lattice_series

if NUMBA_IMPORTABLE:
    lattice_series_nb = njit(cache=True)(_lattice_series)
    pair_clicks_nb = njit(cache=True)(_pair_clicks_loop)
    simplex_pivot_loop_nb = njit(cache=True)(_simplex_loop_scalar)
else:  # pragma: no cover
    lattice_series_nb = pair_clicks_nb = simplex_pivot_loop_nb = None

if HAVE_NUMBA:
    _series_impl = lattice_series_nb
    pair_clicks = pair_clicks_nb
    simplex_pivot_loop = simplex_pivot_loop_nb
else:
    _series_impl = lattice_series_py
    pair_clicks = pair_clicks_py
    simplex_pivot_loop = simplex_pivot_loop_py


def lattice_series(x, D, p, q, m0=0, tol=1e-15, min_terms=1, max_terms=MAX_SERIES_TERMS):
    """Return ``(sum, n_terms)`` of ``sum_{m>=m0} x**(mD+p) / (mD+q)!``.

    Terms with a negative factorial argument are skipped. Summation stops once
    at least ``min_terms`` terms are in and the latest term is below
    ``tol`` times the running sum.
    """
    s, n = _series_impl(float(x), int(D), int(p), int(q), int(m0), float(tol), int(min_terms), int(max_terms))
    return float(s), int(n)
