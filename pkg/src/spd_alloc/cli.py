"""Command-line front end.

Exit codes:
  0  success
  1  verification failure (verify, fixture)
  2  parse or flag error
  3  I/O error
"""

from __future__ import annotations

import argparse
import sys
import time
from itertools import product
from typing import Callable, Sequence

from . import oracle
from .criteria import Criterion, format_score, score
from .divisible import solve_stable_div
from .flow import build_network, solve_linear_objective, solve_stable_ind
from .layers import compute_layers
from .model import Instance, InstanceError, format_allocation, format_profile, parse_instance, parse_rational, profile
from .rng import XorShift64Star

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

EPILOG = """exit codes:
  0  success
  1  verification failure (verify, fixture)
  2  parse or flag error
  3  I/O error

environment:
  SPD_ALLOC_THREADS  worker processes for verify (0 = one per CPU)
"""


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"sizes must be positive integers, got {text!r}")
    return values


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _density(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("density must lie in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spd-alloc",
        description="Exact stable allocations for binary valuations.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a stable allocation")
    p.add_argument("--mode", choices=("ind", "div"), default="ind")
    p.add_argument("--input", required=True, help="instance file ('-' for stdin)")
    p.add_argument("--output", help="write the result here instead of stdout")

    p = sub.add_parser("layers", help="print the layer partition")
    p.add_argument("--input", required=True)

    p = sub.add_parser("score", help="score a profile under one criterion")
    p.add_argument("--criterion", required=True, help="nsw, gini, envysum, congestion, entropy, leximax, leximin, potential-sq")
    p.add_argument("--profile", required=True, help="comma-separated incomes, e.g. 0,5,9 or 4/3,5/3")

    p = sub.add_parser("linear", help="minimize sum of h_i^2 + c_i h_i")
    p.add_argument("--input", required=True)
    p.add_argument("--costs", required=True, help="comma-separated integer cost per agent")

    p = sub.add_parser("verify", help="brute-force verification sweep")
    p.add_argument("--max-n", type=_positive, default=3)
    p.add_argument("--max-m", type=_positive, default=6)
    p.add_argument("--trials", type=_nonneg, default=50)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("bench", help="time the indivisible solver; CSV on stdout")
    p.add_argument("--m", type=_int_list, required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--density", type=_density, default=0.5)
    p.add_argument("--seed", type=int, default=1)

    sub.add_parser("fixture", help="run the mixed divisible/indivisible counterexample")
    return ap


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.input))
    if args.mode == "ind":
        alloc = solve_stable_ind(inst)
        prof = profile(inst, alloc)
    else:
        sol = solve_stable_div(inst)
        alloc, prof = sol.allocation, sol.profile
    body = format_allocation(alloc)
    _emit((body + "\n" if body else "") + f"profile: {format_profile(prof)}\n", args.output)
    return EXIT_OK


def cmd_layers(args) -> int:
    inst = parse_instance(_read(args.input))
    lp = compute_layers(inst, solve_stable_ind(inst))
    out = lp.format()
    sys.stdout.write(out + "\n" if out else "")
    return EXIT_OK


def cmd_score(args) -> int:
    c = Criterion.parse(args.criterion)
    try:
        p = [parse_rational(x.strip()) for x in args.profile.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad profile {args.profile!r}")
    if any(x < 0 for x in p):
        raise UsageError("profile entries must be non-negative")
    print(format_score(score(c, p)))
    return EXIT_OK


def cmd_linear(args) -> int:
    inst = parse_instance(_read(args.input))
    try:
        costs = [int(x) for x in args.costs.split(",")]
    except ValueError:
        raise UsageError(f"bad costs {args.costs!r}")
    if len(costs) != inst.n:
        raise UsageError(f"need {inst.n} costs, got {len(costs)}")
    alloc = solve_linear_objective(inst, costs)
    body = format_allocation(alloc)
    sys.stdout.write((body + "\n" if body else "") + f"profile: {format_profile(profile(inst, alloc))}\n")
    return EXIT_OK


def cmd_verify(args, solver: Callable | None = None) -> int:
    rep = oracle.run_sweep(args.max_n, args.max_m, args.trials, args.seed, solver=solver or solve_stable_ind)
    print(rep.format())
    bad = rep.first_failure()
    if bad is not None:
        print(f"first failure: {bad.name}: {bad.witness}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def bench_rows(ms: Sequence[int], ns: Sequence[int], density: float, seed: int):
    """Yield ``(m, n, density, wall_ms, augmentations)``; instances depend only on (seed, n, m)."""
    for n, m in product(ns, ms):
        rng = XorShift64Star(seed * 1_000_003 + n * 10_007 + m)
        inst = Instance(rng.bernoulli_matrix(n, m, density))
        t0 = time.perf_counter()
        net = build_network(inst).run()
        wall = (time.perf_counter() - t0) * 1000.0
        yield m, n, density, wall, net.augmentations


def cmd_bench(args) -> int:
    print("m,n,density,wall_time_ms,augmentations")
    for m, n, d, wall, aug in bench_rows(args.m, args.n, args.density, args.seed):
        print(f"{m},{n},{d},{wall:.3f},{aug}", flush=True)
    return EXIT_OK


def cmd_fixture(args) -> int:
    rep = oracle.mixed_fixture()
    print(rep.format())
    return EXIT_OK if rep.ok else EXIT_VERIFY


COMMANDS = {
    "solve": cmd_solve,
    "layers": cmd_layers,
    "score": cmd_score,
    "linear": cmd_linear,
    "bench": cmd_bench,
    "fixture": cmd_fixture,
}


def main(argv: Sequence[str] | None = None, *, solver: Callable | None = None) -> int:
    """Entry point; *solver* replaces the indivisible solver in ``verify`` (test hook)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return cmd_verify(args, solver)
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InstanceError, UsageError, oracle.ScaleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
