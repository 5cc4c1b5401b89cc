"""Time the compiled modular kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Both backends are checked
to agree on every input before timings are reported.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from toricimplicit.modular import load_kernels

P = 2**31 - 1


def _inputs(rng: np.random.Generator, n: int):
    a = rng.integers(0, P, size=(n, n + n // 2), dtype=np.int64)
    sq = rng.integers(0, P, size=(n, n), dtype=np.int64)
    b = rng.integers(0, P, size=(n, n), dtype=np.int64)
    lams = np.arange(1, n + 2, dtype=np.int64)
    return a, sq, b, lams


def _cases(mod, a, sq, b, lams):
    return {
        "rref_mod": lambda: mod.rref_mod(a.copy(), P),
        "rank_mod": lambda: mod.rank_mod(a.copy(), P),
        "det_mod": lambda: mod.det_mod(sq.copy(), P),
        "pencil_dets_mod": lambda: np.asarray(mod.pencil_dets_mod(sq, b, lams, P)).tolist(),
    }


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 120])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    compiled, _ = load_kernels("cython")
    fallback, _ = load_kernels("python")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'n':>5}{'cython s':>12}{'numpy s':>12}{'speedup':>10}")
    for n in args.sizes:
        data = _inputs(rng, n)
        fast, slow = _cases(compiled, *data), _cases(fallback, *data)
        for name in fast:
            if fast[name]() != slow[name]():
                raise SystemExit(f"{name}: backends disagree at n={n}")
            tc = min(timeit.repeat(fast[name], number=1, repeat=args.repeat))
            tp = min(timeit.repeat(slow[name], number=1, repeat=args.repeat))
            print(f"{name:<16}{n:>5}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}x")


if __name__ == "__main__":
    main()
