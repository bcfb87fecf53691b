"""Compare the compiled kernel against the numpy fallback.

Usage: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from distillcert import _kernels_py

try:
    from distillcert import _fastsv
except ImportError:
    _fastsv = None


def time_call(fn, *args, repeat=30):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel():
    rng = np.random.default_rng(0)
    print(f"{'case':<24}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for (m, n, k) in [(3, 3, 3), (3, 3, 2), (4, 4, 4), (3, 4, 4)]:
        mats = rng.standard_normal((k, m, n)) + 1j * rng.standard_normal((k, m, n))
        for batch in (64, 256, 1024):
            coeffs = rng.standard_normal((batch, k)) + 1j * rng.standard_normal((batch, k))
            t_py = time_call(_kernels_py.combo_sigma2, mats, coeffs)
            label = f"{m}x{n} k={k} B={batch}"
            if _fastsv is None:
                print(f"{label:<24}{t_py * 1e6:>10.1f}us{'-':>12}{'-':>10}")
                continue
            t_c = time_call(_fastsv.combo_sigma2, mats, coeffs)
            print(
                f"{label:<24}{t_py * 1e6:>10.1f}us{t_c * 1e6:>10.1f}us"
                f"{t_py / t_c:>9.2f}x"
            )


def bench_search():
    import importlib
    import os

    from distillcert.ensembles import rank3_with_product_in_range, random_rank3_npt
    from distillcert.rangesearch import range_basis

    cases = [
        ("planted product 3x3", rank3_with_product_in_range(1)),
        ("no product 3x3", random_rank3_npt(1)),
    ]
    print()
    print(f"{'product search':<24}{'python':>12}{'compiled':>12}")
    for label, state in cases:
        rb = range_basis(state)
        times = {}
        for flag, name in ((1, "python"), (0, "compiled")):
            os.environ["DISTILLCERT_NO_EXT"] = str(flag) if flag else ""
            if not flag:
                os.environ.pop("DISTILLCERT_NO_EXT", None)
            import distillcert._kernels as kmod
            import distillcert.rangesearch as rmod

            importlib.reload(kmod)
            importlib.reload(rmod)
            t0 = time.perf_counter()
            rmod.find_product_vector(rb)
            times[name] = time.perf_counter() - t0
        print(
            f"{label:<24}{times['python'] * 1e3:>10.0f}ms"
            f"{times['compiled'] * 1e3:>10.0f}ms"
        )


if __name__ == "__main__":
    if _fastsv is None:
        print("compiled kernel unavailable; timing the fallback only\n")
    bench_kernel()
    bench_search()
