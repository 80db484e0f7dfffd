"""Time the baseline table against the dyadic solver as k grows.

Prints a CSV with one row per (k, solver) plus the baseline/dyadic ratio.
A rising ratio is the expected trend; absolute times depend on the machine.

    python scripts/bench_scaling.py --n 4000 --ks 16,64,256
"""

import argparse
import csv
import sys
import time

from etfs.dyadic_accel import solve_etfs_dyadic
from etfs.etfs_dp import solve_baseline
from etfs.generate import GenConfig, random_instance


def timed(fn):
    started = time.perf_counter()
    sol = fn()
    return time.perf_counter() - started, sol.distance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--ks", default="16,64,256")
    ap.add_argument("--sigma", type=int, default=4)
    ap.add_argument("--patterns", type=int, default=4)
    ap.add_argument("--max-level", type=int, default=5)
    args = ap.parse_args(argv)

    warm, S = random_instance(GenConfig(n=60, k=9, sigma=2, patterns=2, mode="exact", seed=1))
    solve_baseline(warm, S, keep_table=False)
    solve_etfs_dyadic(warm, S, cutoff=0)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "k", "baseline_s", "dyadic_s", "ratio", "distance"])
    for k in (int(x) for x in args.ks.split(",")):
        inst, S = random_instance(GenConfig(n=args.n, k=k, sigma=args.sigma, patterns=args.patterns,
                                            mode="exact", seed=k))
        tb, db = timed(lambda: solve_baseline(inst, S, keep_table=False))
        td, dd = timed(lambda: solve_etfs_dyadic(inst, S, cutoff=0, max_level=args.max_level))
        if db != dd:
            raise SystemExit(f"distance mismatch at k={k}: {db} vs {dd}")
        out.writerow([args.n, k, f"{tb:.2f}", f"{td:.2f}", f"{tb / td:.3f}", db])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
