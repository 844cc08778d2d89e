"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 20] [--json out.json]

Both variants are imported from the same module, so the LOOPSTRATA_NUMBA
flag does not matter here.  Outputs are checked for equality before timing.
"""

import argparse
import json
import time

import numpy as np

from loopstrata import _kernels as K
from loopstrata.fields import field


def _cases(rng):
    F = field(2, 3)
    mul, add = F.mul, F.add
    Q = F.order
    R = rng.integers(-1, 2, size=(36, 6)).astype(np.int64)
    c = rng.integers(-3, 4, size=36).astype(np.int64)
    lams = rng.integers(-3, 4, size=(2000, 6)).astype(np.int64)
    C = rng.integers(-3, 4, size=(2000, 36)).astype(np.int64)
    A = rng.integers(0, Q, size=(6, 6)).astype(np.int64)
    B = rng.integers(0, Q, size=(6, 6)).astype(np.int64)
    SA = rng.integers(0, Q, size=(6, 6, 6)).astype(np.int64)
    SB = rng.integers(0, Q, size=(6, 6, 6)).astype(np.int64)
    m = rng.integers(0, Q, size=6).astype(np.int64)
    rows = rng.integers(0, Q, size=(6, 6)).astype(np.int64)
    X = rng.integers(0, Q, size=(512, 4, 4)).astype(np.int64)
    G = rng.integers(0, Q, size=(4, 4)).astype(np.int64)
    H = rng.integers(0, Q, size=(4, 4)).astype(np.int64)
    return {
        "affine_length": (c, R, lams[0]),
        "affine_lengths_batch": (C, R, lams),
        "series_scale_rows": (m, rows, mul, add),
        "gf_matmul": (A, B, mul, add),
        "series_matmul": (SA, SB, 6, mul, add),
        "gf_batch_sandwich": (G, X, H, mul, add),
    }


def _time(fn, args, repeat):
    fn(*args)  # warm-up, includes jit compilation
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        print("numba unavailable or disabled: only the numpy path is timed")
    rng = np.random.default_rng(args.seed)
    rows = []
    print(f"{'kernel':<22}{'numpy (us)':>14}{'numba (us)':>14}{'speedup':>10}")
    for name, kargs in _cases(rng).items():
        f_np = K.NUMPY_KERNELS[name]
        t_np = _time(f_np, kargs, args.repeat)
        row = {"kernel": name, "numpy_s": t_np}
        if K.HAVE_NUMBA:
            f_nb = K.NUMBA_KERNELS[name]
            if not np.array_equal(np.asarray(f_np(*kargs)), np.asarray(f_nb(*kargs))):
                raise SystemExit(f"{name}: numba and numpy disagree")
            t_nb = _time(f_nb, kargs, args.repeat)
            row.update(numba_s=t_nb, speedup=t_np / t_nb)
            print(f"{name:<22}{t_np * 1e6:>14.1f}{t_nb * 1e6:>14.1f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<22}{t_np * 1e6:>14.1f}{'-':>14}{'-':>10}")
        rows.append(row)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
