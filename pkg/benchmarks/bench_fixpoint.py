"""Benchmark the compiled fixpoint kernel against the numpy fallback.

Runs both engines on counterexample-family structures of growing size and
prints per-engine wall times plus the speedup.  Usage:

    python benchmarks/bench_fixpoint.py [--levels 2 3 4 5] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from demonic.counterexamples import gen_sn
from demonic.predicates import HAVE_COMPILED, compute_fixpoint


def time_engine(s, engine: str, repeat: int) -> tuple[float, object]:
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = compute_fixpoint(s, engine=engine)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"{'level':>5} {'elements':>8} {'stages':>6} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for n in args.levels:
        s = gen_sn(n)
        t_py, f_py = time_engine(s, "python", args.repeat)
        if HAVE_COMPILED:
            t_c, f_c = time_engine(s, "compiled", args.repeat)
            assert np.array_equal(f_py.black_stage, f_c.black_stage)
            assert np.array_equal(f_py.tri_stage, f_c.tri_stage)
            print(
                f"{n:>5} {s.size:>8} {f_py.last_stage:>6} {t_py:>9.3f}s {t_c:>9.3f}s "
                f"{t_py / t_c:>7.1f}x"
            )
        else:
            print(f"{n:>5} {s.size:>8} {f_py.last_stage:>6} {t_py:>9.3f}s {'-':>10} {'-':>8}")
    if not HAVE_COMPILED:
        print("compiled kernel not built; showing fallback only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
