"""Time the numba kernels against their numpy/python fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

The fallback is what runs when DPRMP_DISABLE_NUMBA=1 is set.
"""
import argparse
import timeit

import numpy as np

from dprmp import _accel, kernels


def _pairing_case():
    rng = np.random.default_rng(0)
    pos = np.cumsum(rng.geometric(0.02, 1_000_000)).astype(np.int64)
    return pos, 100


def _simplex_case(seed=0, m=40, n=60):
    rng = np.random.default_rng(seed)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = rng.uniform(0.1, 1, (m, n))
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = rng.uniform(1, 2, m)
    T[m, :n] = -rng.uniform(0, 1, n)
    return T, np.arange(n, n + m, dtype=np.int64)


def _simplex_runner(fn):
    T0, b0 = _simplex_case()

    def run():
        fn(T0.copy(), b0.copy(), 1e-12, 10_000)

    return run


def cases():
    pos, l = _pairing_case()
    out = {
        "pair_clicks (1e6 clicks)": {
            "numpy": lambda: kernels.pair_clicks_py(pos, l),
            "python-loop": lambda: kernels._pair_clicks_loop(pos, l),
        },
        "simplex pivots (40x100)": {
            "numpy": _simplex_runner(kernels.simplex_pivot_loop_py),
        },
        "lattice series (x=0.3, D=14)": {
            "python": lambda: kernels._lattice_series(0.3, 14, 1, 1, 0, 1e-15, 4, 100_000),
        },
    }
    if _accel.NUMBA_IMPORTABLE:
        out["pair_clicks (1e6 clicks)"]["numba"] = lambda: kernels.pair_clicks_nb(pos, l)
        out["simplex pivots (40x100)"]["numba"] = _simplex_runner(kernels.simplex_pivot_loop_nb)
        out["lattice series (x=0.3, D=14)"]["numba"] = lambda: kernels.lattice_series_nb(0.3, 14, 1, 1, 0, 1e-15, 4, 100_000)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    for name, impls in cases().items():
        for impl in impls.values():
            impl()  # warm-up, includes JIT compilation
        print(name)
        for label, impl in impls.items():
            number = 1 if "pair" in name and label == "python-loop" else 20
            best = min(timeit.repeat(impl, number=number, repeat=args.repeat)) / number
            print(f"  {label:12s} {best * 1e6:12.1f} us")


if __name__ == "__main__":
    main()
