"""
Plain-versus-accelerated benchmark over a list of orders.

Each (mode, r) cell is an independent solve; cells run on a thread pool
capped by SEMIFLOW_THREADS and rows are assembled in cell order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel

from .. import settings
from ..errors import Breakdown, PreconditionViolation, RankAmbiguity, SingularIterate
from ..models.config import SolverConfig, SolverMode
from ..models.problem import LoadedProblem
from .solve import solve_problem

# Configure logging
logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["mode", "r", "outer_steps", "applies", "final_residual", "estimated_order", "status"]

# Status recorded for exceptions that abort a single cell
CELL_ERRORS = {
    Breakdown: "breakdown",
    SingularIterate: "singular_iterate",
    RankAmbiguity: "rank_ambiguity",
    PreconditionViolation: "precondition_violation",
}


class BenchRow(BaseModel):
    mode: SolverMode
    r: int
    outer_steps: int
    applies: int
    final_residual: Optional[float] = None
    estimated_order: Optional[float] = None
    status: str

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _run_cell(problem: LoadedProblem, mode: SolverMode, r: int, tol: float, max_outer: int, force: bool) -> BenchRow:
    cfg = SolverConfig.from_env(order=max(r, 2), tol=tol, max_outer=max_outer, mode=mode)
    try:
        outcome = solve_problem(problem, cfg, force=force)
    except tuple(CELL_ERRORS) as e:
        status = next(label for error, label in CELL_ERRORS.items() if isinstance(e, error))
        logger.error(f"Bench cell {mode.value} r={r} failed: {e}")
        return BenchRow(mode=mode, r=r, outer_steps=0, applies=0, status=status)

    report = outcome.report
    return BenchRow(
        mode=mode,
        r=r,
        outer_steps=report.outer_steps,
        applies=report.applies,
        final_residual=report.final_residual,
        estimated_order=report.estimated_order,
        status=report.status.value,
    )


def bench_cells(orders: Sequence[int]) -> List[Tuple[SolverMode, int]]:
    """The plain cell (r = 1) followed by one accelerated cell per order."""
    return [(SolverMode.PLAIN, 1)] + [(SolverMode.ACCELERATED, r) for r in orders]


def run_bench(
    problem: LoadedProblem,
    orders: Sequence[int],
    tol: Optional[float] = None,
    max_outer: Optional[int] = None,
    force: bool = False,
    threads: Optional[int] = None,
) -> List[BenchRow]:
    """
    Solve the problem once per cell.

    Args:
        problem: A validated problem
        orders: Acceleration orders r ≥ 2
        tol: Residual tolerance (SEMIFLOW_TOL when omitted)
        max_outer: Outer step cap (SEMIFLOW_MAX_ITER when omitted)
        force: Proceed past a violated Stein precondition
        threads: Worker cap (SEMIFLOW_THREADS when omitted)

    Returns:
        One BenchRow per cell, plain row first
    """
    if any(r < 2 for r in orders):
        raise ValueError(f"bench orders must be at least 2, got {list(orders)}")

    tol = settings.DEFAULT_TOL if tol is None else tol
    max_outer = settings.DEFAULT_MAX_ITER if max_outer is None else max_outer
    cells = bench_cells(orders)
    workers = max(1, min(threads or settings.bench_threads(), len(cells)))
    logger.info(f"Running {len(cells)} bench cells on {workers} threads")

    rows: List[Optional[BenchRow]] = [None] * len(cells)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(_run_cell, problem, mode, r, tol, max_outer, force): i
            for i, (mode, r) in enumerate(cells)
        }
        for future in as_completed(futures):
            i = futures[future]
            rows[i] = future.result()
            logger.info(f"Bench cell {rows[i].mode.value} r={rows[i].r}: {rows[i].status}, {rows[i].outer_steps} steps")

    return rows
