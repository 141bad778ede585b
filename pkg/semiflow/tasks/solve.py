"""
Solver dispatch for loaded problem files.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from ..engine.semigroup import iterate
from ..models.config import SolverConfig
from ..models.problem import LoadedProblem, ProblemKind
from ..models.report import ConvergenceReport
from ..models.states import PencilState
from ..services.matrixkit import DenseMatrix
from ..solvers.dare import dare_solve
from ..solvers.nme import nme_solve
from ..solvers.pencil import stable_subspace_solve
from ..solvers.scalar import (
    LinearScalarOperator,
    LinearScalarProblem,
    PairOperator,
    PairProblem,
    RationalScalarOperator,
    RationalScalarProblem,
    pair_limit,
    rational_limit,
)
from ..solvers.stein import stein_solve

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class SolveOutcome:
    """Solution matrix, convergence report and kind-specific extras of one solve."""
    kind: ProblemKind
    solution: DenseMatrix
    report: ConvergenceReport
    details: Dict[str, Any] = field(default_factory=dict)


def _solve_scalar(problem: LoadedProblem, cfg: SolverConfig) -> SolveOutcome:
    s = problem.scalars
    if problem.kind == ProblemKind.SCALAR_LINEAR:
        prob = LinearScalarProblem(a=s["a"], b=s["b"], x1=s["x1"])
        op = LinearScalarOperator(prob)
        details = {"fixed_point": prob.fixed_point}
    elif problem.kind == ProblemKind.SCALAR_RATIONAL:
        prob = RationalScalarProblem(a=s["a"], b=s["b"])
        op = RationalScalarOperator(prob)
        details = {"limit": rational_limit(prob.b, prob.a)}
    else:
        prob = PairProblem(x1=s["x1"], y1=s["y1"])
        op = PairOperator(prob)
        details = {"limit": pair_limit(prob.x1, prob.y1)}

    final, report = iterate(op, op.initial_state(), cfg)
    return SolveOutcome(problem.kind, op.solution_view(final), report, details)


def solve_problem(problem: LoadedProblem, cfg: SolverConfig, force: bool = False) -> SolveOutcome:
    """
    Run the solver matching problem.kind.

    Args:
        problem: A validated problem
        cfg: Solver configuration
        force: Proceed past a violated Stein precondition with a warning

    Returns:
        SolveOutcome; breakdown and iteration caps are reported through the
        report status, data errors raise
    """
    mats = problem.matrices
    logger.info(f"Solving {problem.kind.value} problem ({cfg.mode.value}, r={cfg.order}, tol={cfg.tol:g})")

    if problem.kind == ProblemKind.STEIN:
        X, report = stein_solve(mats["A"], mats["B"], mats["C"], cfg, force=force)
        return SolveOutcome(problem.kind, X, report)

    if problem.kind == ProblemKind.PENCIL:
        result = stable_subspace_solve(PencilState(mats["A"], mats["B"]), problem.m, cfg)
        details = {
            "Lambda": result.Lambda,
            "subspace_residual": result.residual,
            "max_b_norm": result.max_b_norm,
            "b_growth_flag": result.b_growth_flag,
            "lambda_eigenvalues": np.linalg.eigvals(result.Lambda),
        }
        return SolveOutcome(problem.kind, result.U, result.report, details)

    if problem.kind == ProblemKind.NME:
        X, report = nme_solve(mats["Q"], mats["A"], mats["B"], cfg)
        return SolveOutcome(problem.kind, X, report)

    if problem.kind == ProblemKind.DARE:
        X, report = dare_solve(mats["A"], mats["G"], mats["H"], cfg)
        return SolveOutcome(problem.kind, X, report)

    return _solve_scalar(problem, cfg)
