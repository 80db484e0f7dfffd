"""Solve the bundled example documents with every applicable solver."""

from pathlib import Path

from etfs import load_instance, normalize_sensitive_set, verify_feasible
from etfs.aetfs_dag import solve_dag
from etfs.dyadic_accel import solve_aetfs_dyadic, solve_etfs_dyadic
from etfs.etfs_dp import solve_baseline

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    for path in sorted(DATA.glob("*.txt")):
        inst, raw = load_instance(path)
        S = normalize_sensitive_set(raw, inst)
        solvers = [solve_dag, lambda i, s: solve_aetfs_dyadic(i, s, cutoff=0)]
        if S.ell <= inst.k:
            solvers += [solve_baseline, lambda i, s: solve_etfs_dyadic(i, s, cutoff=0)]
        print(f"{path.name}: W={inst.word} k={inst.k} |S|={len(S.intervals)}")
        for solve in solvers:
            sol = solve(inst, S)
            ok = verify_feasible(sol.output, inst, S).feasible
            print(f"  {sol.algo:<13} distance={sol.distance:g} output={sol.output_str} feasible={ok}")


if __name__ == "__main__":
    main()
