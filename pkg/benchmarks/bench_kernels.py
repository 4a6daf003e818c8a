"""Time the compiled (numba) kernels against the numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--sizes 1000 100000] [--repeat 5]

The library picks one flavour at import time (``LIESYS_DISABLE_NUMBA=1``
forces numpy); this script builds both side by side so they can be compared
in one process.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from liesys import _kernels as K
from liesys.expr import compile_program, parse

try:
    import numba
except ImportError:
    numba = None


def cases(n: int, rng: np.random.Generator):
    prog = compile_program(parse("sin(t)^2*exp(-t/3) + sqrt(abs(t) + 1)/(1 + t^2) - log(2 + cos(3*t))"))
    ts = np.linspace(-5, 5, n)
    starts = np.linspace(0, 10, max(n // 10, 2), endpoint=False)
    hs = np.full(starts.shape, starts[1] - starts[0])
    coeffs = rng.normal(size=(starts.size, 5, 4))
    b = rng.normal(size=(3, n))
    s = rng.uniform(-2, 2, n)
    mats = K.expm_sl2_numpy(b[0], b[1], b[2], s)
    p, q = rng.normal(size=(2, n))
    h = rng.normal(size=(6, n))
    return {
        "run_program": (prog.ops, prog.args, prog.consts, ts, prog.stack_size),
        "dense_eval": (starts, hs, coeffs, np.linspace(0, 10, n, endpoint=False)),
        "expm_sl2": (b[0], b[1], b[2], s),
        "mobius": (mats, p, q),
        "cross_ratio": (*h, 1.7),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 100_000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12} {'n':>8} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for n in args.sizes:
        for name, argv in cases(n, rng).items():
            np_fn = getattr(K, f"{name}_numpy")
            t_np = min(timeit.repeat(lambda: np_fn(*argv), number=1, repeat=args.repeat))
            if numba is None:
                print(f"{name:<12} {n:>8} {1e3 * t_np:>11.3f} {'n/a':>11} {'':>8}")
                continue
            jit_fn = numba.njit(cache=True)(getattr(K, f"{name}_loop"))
            jit_fn(*argv)  # compile outside the timed region
            t_jit = min(timeit.repeat(lambda: jit_fn(*argv), number=1, repeat=args.repeat))
            print(f"{name:<12} {n:>8} {1e3 * t_np:>11.3f} {1e3 * t_jit:>11.3f} {t_np / t_jit:>7.1f}x")


if __name__ == "__main__":
    main()
