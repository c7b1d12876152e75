"""Command-line interface.

Exit status is 0 on success, 1 for bad input (malformed files, violated
hypotheses) and 2 when a verification or certificate check fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from .discrepancy import SOLVERS, SampleMatrix, solve
from .pipeline import (
    BalanceResult,
    balance_degree_d,
    balance_l2,
    balance_sup,
    instance_from_json,
    instance_to_json,
    random_instance,
    random_l2_instance,
    verify,
)
from .rudin_shapiro import LOWER_BOUND_POINTS, flatness_report, l2_identity, lower_bound_check, rs_signs
from .sup_norm import DEFAULT_DENSE_POINTS

EXIT_OK, EXIT_INPUT, EXIT_INTEGRITY = 0, 1, 2
PLOT_COLUMNS = ("n", "solver", "grid_discrepancy", "certified_bound", "bound_30_sqrt_n")


class InputError(Exception):
    pass


class IntegrityError(Exception):
    pass


def _read_json(path: str | None):
    if path is None:
        raise InputError("--in is required for this command")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _check_writable(path: str | None):
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise InputError(f"cannot write to {path}")


def dumps(payload) -> str:
    """Canonical JSON text for report payloads (no timestamps, fixed order)."""
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _emit(payload, out: str | None):
    text = dumps(payload)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def emit_plot_data(rows, path) -> None:
    """Write bench rows as CSV with a stable column order (header only if empty)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLOT_COLUMNS)
        for row in rows:
            writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in PLOT_COLUMNS])


def _load_instance(args):
    return instance_from_json(_read_json(args.input))


def _dense(args) -> int:
    return args.points or DEFAULT_DENSE_POINTS


def cmd_gen(args):
    if args.n is None or args.n < 1:
        raise InputError("gen needs --n >= 1")
    if args.kind == "l2":
        polys, bound = random_l2_instance(args.n, args.seed), args.n - 1
    else:
        deg = args.d if args.d is not None else args.n
        polys, bound = random_instance(args.n, args.seed, degree=deg), deg
    return instance_to_json(polys, bound)


def cmd_balance(args):
    polys, _ = _load_instance(args)
    res = balance_sup(polys, args.solver, M=args.M, seed=args.seed, restarts=args.restarts, dense_points=_dense(args))
    return res.to_json()


def cmd_balance_l2(args):
    polys, _ = _load_instance(args)
    res = balance_l2(polys, args.solver, seed=args.seed, restarts=args.restarts, dense_points=_dense(args))
    return res.to_json()


def cmd_balance_d(args):
    polys, bound = _load_instance(args)
    d = args.d if args.d is not None else bound
    res = balance_degree_d(polys, d, args.solver, seed=args.seed, restarts=args.restarts, dense_points=_dense(args))
    return res.to_json()


def cmd_verify(args):
    result = BalanceResult.from_json(_read_json(args.input))
    if args.instance is None:
        raise InputError("verify needs --instance (the polynomials the result refers to)")
    polys, _ = instance_from_json(_read_json(args.instance))
    ok = verify(result, polys)
    payload = {"verified": ok, "mode": result.mode, "n": result.n}
    if not ok:
        _emit(payload, args.out)
        raise IntegrityError("result does not match recomputation")
    return payload


def cmd_rs(args):
    if args.n is None:
        raise InputError("rs needs --n")
    return flatness_report(args.n, args.thetas).to_json()


def cmd_lower_bound(args):
    if args.n is None:
        raise InputError("lower-bound needs --n")
    try:
        best = lower_bound_check(args.n, args.points or LOWER_BOUND_POINTS)
    except AssertionError as exc:
        raise IntegrityError(str(exc)) from exc
    return {
        "n": args.n,
        "min_sup": best,
        "bound": math.sqrt(args.n / 2),
        "l2_mass_rs": l2_identity(args.n, rs_signs(args.n)),
    }


def cmd_solve(args):
    mat = SampleMatrix.from_json(_read_json(args.input))
    return solve(mat, args.solver, seed=args.seed, restarts=args.restarts).to_json()


def run_bench(ns, solvers, trials=1, seed=0, restarts=50, brute_max_n=16, dense_points=DEFAULT_DENSE_POINTS):
    """Balance random certified-unit instances for every ``(n, solver)`` pair.

    Returns ``(rows, table)``: one row per run, and per solver the mean and
    max of ``certified_bound / sqrt(n)`` keyed by ``n``.
    """
    rows = []
    for n in ns:
        for t in range(trials):
            inst_seed = seed + t
            polys = random_instance(n, inst_seed)
            for name in solvers:
                if name == "brute" and n > brute_max_n:
                    continue
                res = balance_sup(polys, solver=name, seed=inst_seed, restarts=restarts, dense_points=dense_points)
                rows.append({
                    "n": n,
                    "solver": name,
                    "trial": t,
                    "seed": inst_seed,
                    "grid_discrepancy": res.grid_discrepancy,
                    "certified_bound": res.certificate.certified_bound,
                    "bound_30_sqrt_n": 30.0 * math.sqrt(n),
                    "constant": res.measured_constant,
                    "flagged": res.solver_report.flagged,
                })
    table = {}
    for name in solvers:
        per_n = {}
        for n in ns:
            vals = [r["constant"] for r in rows if r["solver"] == name and r["n"] == n]
            if vals:
                per_n[str(n)] = {"mean": math.fsum(vals) / len(vals), "max": max(vals)}
        table[name] = per_n
    return rows, table


def cmd_bench(args):
    ns = [int(v) for v in args.ns.split(",") if v.strip()]
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    for s in solvers:
        if s not in SOLVERS:
            raise InputError(f"unknown solver {s!r}")
    if any(n < 1 for n in ns):
        raise InputError("--ns values must be positive")
    _check_writable(args.csv)
    rows, table = run_bench(
        ns, solvers, trials=args.trials, seed=args.seed, restarts=args.restarts,
        brute_max_n=args.brute_max_n, dense_points=_dense(args),
    )
    if args.csv:
        emit_plot_data(rows, args.csv)
    return {"ns": ns, "solvers": solvers, "trials": args.trials, "seed": args.seed, "table": table, "runs": rows}


COMMANDS = {
    "gen": cmd_gen,
    "balance": cmd_balance,
    "balance-l2": cmd_balance_l2,
    "balance-d": cmd_balance_d,
    "verify": cmd_verify,
    "rs": cmd_rs,
    "lower-bound": cmd_lower_bound,
    "solve": cmd_solve,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--M", type=int, default=9)
    common.add_argument("--solver", choices=SOLVERS, default="greedy")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=50)
    common.add_argument("--in", dest="input")
    common.add_argument("--out")
    common.add_argument("--points", type=int,
                        help="dense-sampling resolution (default 100000; 10000 for lower-bound)")

    parser = argparse.ArgumentParser(prog="polybalance", description="Balance polynomials with signs.")
    sub = parser.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("gen", parents=[common], help="write a random instance file")
    gen.add_argument("--kind", choices=("sup", "l2"), default="sup")
    sub.add_parser("balance", parents=[common], help="sup-norm pipeline (degree <= n)")
    sub.add_parser("balance-l2", parents=[common], help="L2-hypothesis pipeline on roots of T_9n")
    sub.add_parser("balance-d", parents=[common], help="degree-d pipeline (d >= n)")
    ver = sub.add_parser("verify", parents=[common], help="re-check a result file")
    ver.add_argument("--instance", help="instance file the result was computed from")
    rs = sub.add_parser("rs", parents=[common], help="Rudin-Shapiro flatness report")
    rs.add_argument("--thetas", type=int, help="circle resolution (default 8n)")
    sub.add_parser("lower-bound", parents=[common], help="exhaustive sqrt(n/2) check, n <= 10")
    sub.add_parser("solve", parents=[common], help="run a solver on a matrix file")
    bench = sub.add_parser("bench", parents=[common], help="constants table over n and solvers")
    bench.add_argument("--ns", default="4,8,16")
    bench.add_argument("--solvers", default=",".join(SOLVERS))
    bench.add_argument("--trials", type=int, default=1)
    bench.add_argument("--brute-max-n", type=int, default=16)
    bench.add_argument("--csv", help="also write per-run rows as CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.M < 4:
            raise InputError(f"--M must be >= 4, got {args.M}")
        _check_writable(args.out)
        payload = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IntegrityError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (RuntimeError, AssertionError) as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(payload, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
