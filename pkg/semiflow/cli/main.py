#!/usr/bin/env python3
"""
semiflow command line: solve, bench, check and example.

Exit codes: 0 converged (or all checks passed), 1 input error, 2 iteration
cap reached, 3 breakdown or singular iterate, 4 check failure.
"""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np

from .. import __version__, settings
from ..errors import (
    Breakdown,
    DegenerateCoefficient,
    DimensionMismatch,
    EigenFailure,
    InvalidMatrix,
    PreconditionViolation,
    ProblemFileError,
    RankAmbiguity,
    SemiflowError,
    SingularIterate,
    SingularMatrix,
)
from ..models.config import SolverConfig, SolverMode
from ..models.report import RunRecord, Status
from ..tasks.bench import BENCH_COLUMNS, run_bench
from ..tasks.checks import SUITES, run_suites
from ..tasks.solve import SolveOutcome, solve_problem
from .problems import encode_entry, encode_matrix, load_problem, write_example_problems

# Configure logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MAX_ITER = 2
EXIT_BREAKDOWN = 3
EXIT_CHECK_FAILED = 4

STATUS_EXIT = {
    Status.CONVERGED: EXIT_OK,
    Status.MAX_ITERATIONS: EXIT_MAX_ITER,
    Status.BREAKDOWN: EXIT_BREAKDOWN,
}

INPUT_ERRORS = (ProblemFileError, PreconditionViolation, DimensionMismatch, InvalidMatrix, DegenerateCoefficient, ValueError)
NUMERIC_ERRORS = (Breakdown, SingularIterate, RankAmbiguity, SingularMatrix, EigenFailure)

HISTORY_COLUMNS = ["k", "index", "residual", "elapsed_us"]


def _jsonable(value: Any) -> Any:
    """Matrices and complex numbers in the problem-file encoding; everything else as plain JSON."""
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return encode_matrix(value)
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return value.real if value.imag == 0 else encode_entry(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {key: _jsonable(v) for key, v in value.items()}
    return value


def output_prefix(problem_path: Path, out: Optional[str]) -> Path:
    """--out when given, otherwise the problem path without its suffix."""
    if out:
        return Path(out)
    return problem_path.with_suffix("")


def write_solution(prefix: Path, outcome: SolveOutcome) -> Path:
    report = outcome.report
    body = {
        "kind": outcome.kind.value,
        "status": report.status.value,
        "solution": encode_matrix(outcome.solution),
        "outer_steps": report.outer_steps,
        "applies": report.applies,
        "order": report.order,
        "final_residual": report.final_residual,
        "estimated_order": report.estimated_order,
        "estimated_rate": report.estimated_rate,
        "message": report.message,
        "details": _jsonable(outcome.details),
    }
    path = prefix.parent / f"{prefix.name}.solution.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(body, f, indent=2)
    return path


def write_history(prefix: Path, record: RunRecord) -> Path:
    path = prefix.parent / f"{prefix.name}.history.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=HISTORY_COLUMNS)
        writer.writeheader()
        for row in record.rows:
            writer.writerow({
                "k": row.k,
                "index": row.index,
                "residual": repr(row.residual),
                "elapsed_us": row.elapsed_us,
            })
    return path


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve one problem file and write <prefix>.solution.json and <prefix>.history.csv."""
    problem_path = Path(args.problem)
    try:
        problem = load_problem(problem_path)
        cfg = SolverConfig.from_env(order=args.order, tol=args.tol, max_outer=args.max_iter, mode=args.mode)
        outcome = solve_problem(problem, cfg, force=args.force)
    except INPUT_ERRORS as e:
        logger.error(f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NUMERIC_ERRORS as e:
        logger.error(f"Solve failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BREAKDOWN

    prefix = output_prefix(problem_path, args.out)
    solution_path = write_solution(prefix, outcome)
    history_path = write_history(prefix, RunRecord.from_report(outcome.report))

    report = outcome.report
    print(f"{problem.kind.value}: {report.status.value} after {report.outer_steps} outer steps, "
          f"residual {report.final_residual:.3e}")
    print(f"Wrote {solution_path} and {history_path}")
    return STATUS_EXIT[report.status]


def cmd_bench(args: argparse.Namespace) -> int:
    """One plain cell plus one accelerated cell per order, written to <prefix>.bench.csv."""
    problem_path = Path(args.problem)
    try:
        problem = load_problem(problem_path)
        rows = run_bench(problem, args.orders, tol=args.tol, max_outer=args.max_iter, force=args.force)
    except INPUT_ERRORS as e:
        logger.error(f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    prefix = output_prefix(problem_path, args.out)
    path = prefix.parent / f"{prefix.name}.bench.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for row in rows:
            values = row.model_dump()
            values["mode"] = row.mode.value
            writer.writerow({key: "" if value is None else value for key, value in values.items()})

    for row in rows:
        print(f"{row.mode.value:<12} r={row.r:<3} steps={row.outer_steps:<5} applies={row.applies:<5} {row.status}")
    print(f"Wrote {path}")
    return EXIT_OK if all(row.converged for row in rows) else EXIT_MAX_ITER


def cmd_check(args: argparse.Namespace) -> int:
    """Run property suites; exit 4 when any suite fails."""
    try:
        cfg = SolverConfig.from_env(seed=args.seed)
        results = run_suites(args.suite, seed=cfg.seed, trials=args.trials)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    for result in results:
        verdict = "PASS" if result.passed else "FAIL"
        print(f"{result.name:<16} max_error={result.max_error:.3e} tol={result.tolerance:.0e} "
              f"skipped={result.skipped} {verdict}")
        for failure in result.failures:
            print(f"    {failure}")
    return EXIT_OK if all(result.passed for result in results) else EXIT_CHECK_FAILED


def cmd_example(args: argparse.Namespace) -> int:
    """Write one sample problem per kind into a directory."""
    written = write_example_problems(Path(args.directory), seed=args.seed)
    for path in written:
        print(f"Wrote {path}")
    return EXIT_OK


def _orders(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"orders must be comma-separated integers, got {text!r}")


def _suites(text: str) -> List[str]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    for name in names:
        if name != "all" and name not in SUITES:
            raise argparse.ArgumentTypeError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semiflow", description="Semigroup-accelerated fixed-point solvers.")
    parser.add_argument("--version", action="version", version=f"semiflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_options(p: argparse.ArgumentParser) -> None:
        p.add_argument("problem", help="problem JSON file")
        p.add_argument("--tol", type=float, default=None, help="residual tolerance (SEMIFLOW_TOL)")
        p.add_argument("--max-iter", type=int, default=None, help="outer step cap (SEMIFLOW_MAX_ITER)")
        p.add_argument("--out", default=None, help="output prefix (default: problem path without suffix)")
        p.add_argument("--force", action="store_true", help="run past a violated Stein precondition")

    solve = sub.add_parser("solve", help="solve one problem file")
    solver_options(solve)
    solve.add_argument("--mode", type=SolverMode, choices=list(SolverMode), default=SolverMode.ACCELERATED)
    solve.add_argument("--order", type=int, default=2, help="acceleration order r")
    solve.set_defaults(handler=cmd_solve)

    bench = sub.add_parser("bench", help="compare plain and accelerated iterations")
    solver_options(bench)
    bench.add_argument("--orders", type=_orders, default=[2, 3, 4], help="comma-separated orders, e.g. 2,3,4")
    bench.set_defaults(handler=cmd_bench)

    check = sub.add_parser("check", help="run property check suites")
    check.add_argument("--suite", type=_suites, default=["all"], help=f"{', '.join(SUITES)} or all")
    check.add_argument("--seed", type=int, default=None, help="suite RNG seed (default: SEMIFLOW_SEED or 7)")
    check.add_argument("--trials", type=int, default=100)
    check.set_defaults(handler=cmd_check)

    example = sub.add_parser("example", help="write sample problem files")
    example.add_argument("directory", help="target directory")
    example.add_argument("--seed", type=int, default=7)
    example.set_defaults(handler=cmd_example)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SemiflowError as e:
        logger.error(f"Unhandled solver error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
