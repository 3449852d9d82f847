"""The numba kernels and their numpy fallbacks must agree exactly."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dprmp import _accel, kernels

needs_numba = pytest.mark.skipif(not _accel.NUMBA_IMPORTABLE, reason="numba not installed")


def greedy_reference(pos, l):
    # plain-python statement of the pairing rule
    first, second = [], []
    i = 0
    while i + 1 < len(pos):
        if pos[i + 1] - pos[i] <= l:
            first.append(i)
            second.append(i + 1)
            i += 2
        else:
            i += 1
    return first, second


@settings(max_examples=200, deadline=None)
@given(gaps=st.lists(st.integers(1, 20), max_size=200), l=st.integers(1, 15))
def test_pairing_matches_reference(gaps, l):
    pos = np.cumsum(np.array(gaps, dtype=np.int64))
    ref = greedy_reference(pos.tolist(), l)
    f, s = kernels.pair_clicks_py(pos, l)
    assert list(f) == ref[0] and list(s) == ref[1]
    f2, s2 = kernels._pair_clicks_loop(pos, l)
    assert list(f2) == ref[0] and list(s2) == ref[1]


@needs_numba
def test_pairing_numba_equals_numpy():
    rng = np.random.default_rng(3)
    pos = np.cumsum(rng.geometric(0.01, 200_000)).astype(np.int64)
    a = kernels.pair_clicks_nb(pos, 150)
    b = kernels.pair_clicks_py(pos, 150)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_lattice_series_closed_forms():
    x = 0.7
    assert kernels.lattice_series(x, 2, 0, 0)[0] == pytest.approx(math.cosh(x), rel=1e-15)
    assert kernels.lattice_series(x, 2, 1, 1)[0] == pytest.approx(math.sinh(x), rel=1e-15)
    assert kernels.lattice_series(x, 2, 0, 0, m0=1)[0] == pytest.approx(math.cosh(x) - 1, rel=1e-14)
    total, count = kernels.lattice_series(0.0, 4, 0, 0, min_terms=4)
    assert total == 1.0 and count >= 4


@needs_numba
@pytest.mark.parametrize("args", [(0.3, 8, 1, 1, 0), (2.5, 4, 0, 1, 1), (0.01, 14, 3, 2, 0)])
def test_lattice_numba_equals_python(args):
    x, D, p, q, m0 = args
    a = kernels.lattice_series_nb(x, D, p, q, m0, 1e-15, 4, 1000)
    b = kernels._lattice_series(x, D, p, q, m0, 1e-15, 4, 1000)
    assert a == b


def _tableau(seed):
    rng = np.random.default_rng(seed)
    m, n = 4, 6
    A = rng.uniform(0.1, 1, (m, n))
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = rng.uniform(1, 2, m)
    T[m, :n] = -rng.uniform(0, 1, n)
    return T, np.arange(n, n + m, dtype=np.int64)


@pytest.mark.parametrize("seed", range(5))
def test_simplex_backends_agree(seed):
    T1, b1 = _tableau(seed)
    T2, b2 = T1.copy(), b1.copy()
    r1 = kernels.simplex_pivot_loop_py(T1, b1, 1e-12, 100)
    r2 = kernels._simplex_loop_scalar(T2, b2, 1e-12, 100)
    assert r1 == r2 and r1[0] == kernels.OPTIMAL
    assert np.array_equal(b1, b2)
    assert np.allclose(T1, T2, rtol=0, atol=1e-12)
    if _accel.NUMBA_IMPORTABLE:
        T3, b3 = _tableau(seed)
        assert kernels.simplex_pivot_loop_nb(T3, b3, 1e-12, 100) == r1
        assert np.array_equal(b3, b1)


def test_backend_flag_reported():
    assert _accel.backend_name() in ("numba", "numpy")


def test_env_flag_selects_numpy_fallback():
    import os
    import subprocess
    import sys

    code = (
        "from dprmp import backend_name, key_rate, ChannelParams;"
        "print(backend_name(), repr(key_rate(0.1, 12, 10**4, ChannelParams(L_km=100)).R))"
    )
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, DPRMP_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[flag] = res.stdout.split()
    assert out["1"][0] == "numpy"
    assert out["0"][0] == ("numba" if _accel.NUMBA_IMPORTABLE else "numpy")
    assert out["1"][1] == out["0"][1]
