"""Command-line front end: ``solve``, ``verify``, ``gen`` and ``bench``.

Exit codes: 0 on success, 2 for an invalid instance or candidate, 4 for
flag misuse (including asking an ETFS-only solver for long patterns).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass

from .aetfs_dag import solve_dag
from .dyadic_accel import DEFAULT_CUTOFF, DEFAULT_MAX_LEVEL, solve_aetfs_dyadic, solve_etfs_dyadic
from .errors import DomainError, LongPatternError, SanitizeError
from .etfs_dp import solve_baseline
from .generate import GenConfig, random_instance
from .model import UNIT, Weights, format_instance, load_instance, normalize_sensitive_set, verify_feasible

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 2, 4
ALGOS = ("baseline", "dag", "dyadic", "auto")


@dataclass(frozen=True)
class RunConfig:
    command: str
    algo: str = "auto"
    weights: Weights = UNIT
    json: bool = False
    seed: int = 0
    paths: tuple = ()


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def pick_algo(algo: str, k: int, ell: int) -> str:
    """Resolve ``auto`` and split ``dyadic`` by pattern lengths."""
    if algo == "auto":
        if ell <= k:
            return "baseline" if k <= 8 else "dyadic"
        return "aetfs-dyadic"
    if algo == "dyadic" and ell > k:
        return "aetfs-dyadic"
    return algo


def solve(instance, S, algo: str, cutoff: int = DEFAULT_CUTOFF, max_level: int = DEFAULT_MAX_LEVEL):
    chosen = pick_algo(algo, instance.k, S.ell)
    if chosen == "baseline":
        return solve_baseline(instance, S, keep_table=False)
    if chosen == "dag":
        return solve_dag(instance, S, keep_table=False)
    if chosen == "dyadic":
        return solve_etfs_dyadic(instance, S, cutoff=cutoff, max_level=max_level)
    return solve_aetfs_dyadic(instance, S, cutoff=cutoff, max_level=max_level)


def _load(path, weights, strict):
    instance, raw = load_instance(path, weights)
    return instance, normalize_sensitive_set(raw, instance, strict=strict)


def _cmd_solve(args) -> int:
    instance, S = _load(args.instance, args.weights, args.strict)
    sol = solve(instance, S, args.algo, args.cutoff, args.max_level)
    if args.json:
        print(json.dumps(sol.to_json()))
    else:
        print(f"distance={sol.distance:g}")
        print(f"output={sol.output_str}")
        print(f"algo={sol.algo}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    instance, S = _load(args.instance, UNIT, args.strict)
    verdict = verify_feasible(args.candidate, instance, S)
    if args.json:
        print(json.dumps({"feasible": verdict.feasible, "c1_ok": verdict.c1_ok, "p1_ok": verdict.p1_ok,
                          "witness": verdict.witness, "reason": verdict.reason}))
    else:
        print("feasible" if verdict.feasible else f"infeasible: {verdict.reason}")
    return EXIT_OK


def _gen_config(args, n, k, seed) -> GenConfig:
    return GenConfig(n=n, k=k, sigma=args.sigma, patterns=args.patterns, mode=args.mode,
                     min_len=args.min_len, max_len=args.max_len, seed=seed)


def _cmd_gen(args) -> int:
    instance, S = random_instance(_gen_config(args, args.n, args.k, args.seed))
    sys.stdout.write(format_instance(instance, S.intervals))
    return EXIT_OK


def _warm_up(algos, cutoff, max_level):
    # compile the numba kernels outside the timed region
    instance, S = random_instance(GenConfig(n=40, k=4, sigma=2, patterns=2, mode="short", seed=1))
    for algo in algos:
        solve(instance, S, algo, cutoff, max_level)


def _cmd_bench(args) -> int:
    _warm_up(args.algos, min(args.cutoff, 0), args.max_level)
    rows = []
    for n in args.n:
        for k in args.k:
            instance, S = random_instance(_gen_config(args, n, k, args.seed))
            for algo in args.algos:
                try:
                    sol = solve(instance, S, algo, args.cutoff, args.max_level)
                except LongPatternError as exc:
                    print(f"skip n={n} k={k} {algo}: {exc}", file=sys.stderr)
                    continue
                rows.append((n, k, algo, round(sol.stats["millis"], 3), sol.distance))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "k", "algo", "millis", "distance"])
    out.writerows(rows)
    return EXIT_OK


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _weights(text):
    try:
        return Weights.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="etfs", description="Optimal string sanitization with gadget symbols.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tuning(p):
        p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF,
                       help="k at or below which the dyadic solvers fall back to the plain ones")
        p.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL,
                       help="largest block is 2**max-level")

    p = sub.add_parser("solve", help="sanitize an instance document")
    p.add_argument("instance")
    p.add_argument("--algo", choices=ALGOS, default="auto")
    p.add_argument("--weights", type=_weights, default=UNIT, help="sub,ins,del")
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true", help="reject non-closed or non-minimal S")
    tuning(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="check a candidate output")
    p.add_argument("instance")
    p.add_argument("--candidate", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_verify)

    def gen_args(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--sigma", type=int, default=2)
        p.add_argument("--patterns", type=int, default=3)
        p.add_argument("--mode", choices=("short", "exact", "long", "mixed"), default="mixed")
        p.add_argument("--min-len", type=int, default=None)
        p.add_argument("--max-len", type=int, default=None)

    p = sub.add_parser("gen", help="emit a random instance document")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--k", type=int, default=4)
    gen_args(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="time solvers on generated instances, CSV to stdout")
    p.add_argument("--n", type=_int_list, default=[1000])
    p.add_argument("--k", type=_int_list, default=[16, 64])
    p.add_argument("--algos", type=lambda s: s.split(","), default=["baseline", "dyadic"])
    gen_args(p)
    tuning(p)
    p.set_defaults(func=_cmd_bench)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "algos", None):
            bad = [a for a in args.algos if a not in ALGOS]
            if bad:
                raise _UsageError(f"unknown algo(s): {', '.join(bad)}")
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LongPatternError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SanitizeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())
