"""
Stein equation X = AXB + C.

Smith iteration through the generic engine (stein_operator), the direct
r-Smith recursion, residual and the ρ(A)ρ(B) < 1 precondition.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from ..engine.semigroup import ReportBuilder, SemigroupOperator, iterate
from ..errors import DimensionMismatch, PreconditionViolation
from ..models.config import SolverConfig
from ..models.report import ConvergenceReport, Status
from ..models.states import SteinState, require_conforming
from ..services.matrixkit import DenseMatrix, as_matrix, fro_norm, spectral_radius

# Configure logging
logger = logging.getLogger(__name__)


def stein_operator(xa: SteinState, xb: SteinState) -> SteinState:
    """F(X_a, X_b) = (A_a·A_b, B_b·B_a, C_a + A_a·C_b·B_a); never breaks down."""
    require_conforming(xa, xb)
    return SteinState(
        A=xa.A @ xb.A,
        B=xb.B @ xa.B,
        C=xa.C + xa.A @ xb.C @ xa.B,
    )


def stein_residual(problem: SteinState, X: DenseMatrix) -> float:
    """‖X − AXB − C‖_F / max(1, ‖C‖_F)."""
    X = np.asarray(X)
    if X.shape != problem.C.shape:
        raise DimensionMismatch(f"X has shape {X.shape}, C has {problem.C.shape}")
    return fro_norm(X - problem.A @ X @ problem.B - problem.C) / max(1.0, fro_norm(problem.C))


class SteinOperator(SemigroupOperator[SteinState]):
    """Smith iteration X_{k+1} = F(X_k, X_1) with X_1 the problem (A, B, C)."""

    name = "stein"

    def __init__(self, problem: SteinState):
        self.problem = problem

    def apply(self, xa: SteinState, xb: SteinState) -> SteinState:
        return stein_operator(xa, xb)

    def residual(self, x: SteinState) -> float:
        return stein_residual(self.problem, x.C)

    def solution_view(self, x: SteinState) -> DenseMatrix:
        return x.C


def check_stein_precondition(problem: SteinState, force: bool = False) -> float:
    """
    Check ρ(A)ρ(B) < 1.

    Args:
        problem: Stein data (A, B, C)
        force: Log a warning instead of raising when the product is ≥ 1

    Returns:
        The product ρ(A)ρ(B)

    Raises:
        PreconditionViolation: if ρ(A)ρ(B) ≥ 1 and force is False
    """
    product = spectral_radius(problem.A) * spectral_radius(problem.B)
    if product >= 1:
        message = f"Stein precondition violated: rho(A)*rho(B) = {product:.6g} >= 1"
        if not force:
            raise PreconditionViolation(message)
        logger.warning(f"{message}; continuing because force is set")
    return product


def stein_solve(
    A: DenseMatrix,
    B: DenseMatrix,
    C: DenseMatrix,
    cfg: SolverConfig,
    force: bool = False,
) -> Tuple[DenseMatrix, ConvergenceReport]:
    """Solve X = AXB + C with the plain or accelerated Smith iteration (cfg.mode)."""
    problem = SteinState(as_matrix(A), as_matrix(B), as_matrix(C))
    product = check_stein_precondition(problem, force)
    logger.info(f"Solving Stein equation {problem.C.shape}, rho product {product:.4g}, mode {cfg.mode.value}")

    final, report = iterate(SteinOperator(problem), problem, cfg)
    return final.C, report


def r_smith_direct(
    state: SteinState,
    r: int,
    cfg: SolverConfig,
    force: bool = False,
) -> Tuple[DenseMatrix, ConvergenceReport]:
    """
    r-Smith iteration without the generic engine.

    Â_{k+1} = Â_k^r, B̂_{k+1} = B̂_k^r and Ĉ_{k+1} = Σ_{ℓ<r} Â_k^ℓ Ĉ_k B̂_k^ℓ,
    the sum evaluated Horner-style as Ĉ + Â(Ĉ + Â(...)B̂)B̂ with r − 1
    multiplies per side. Row k of the report has iterate index r^{k−1}.
    """
    if r < 2:
        raise ValueError(f"order r must be at least 2, got {r}")
    check_stein_precondition(state, force)

    builder = ReportBuilder(order=r)
    a_hat, b_hat, c_hat = state.A, state.B, state.C

    residual = stein_residual(state, c_hat)
    builder.record(1, residual)
    status: Optional[Status] = Status.CONVERGED if residual <= cfg.tol else None

    k = 1
    while status is None and k <= cfg.max_outer:
        acc = c_hat
        for _ in range(r - 1):
            acc = c_hat + a_hat @ acc @ b_hat
        c_hat = acc
        a_hat = np.linalg.matrix_power(a_hat, r)
        b_hat = np.linalg.matrix_power(b_hat, r)
        builder.applies += r - 1
        k += 1

        residual = stein_residual(state, c_hat)
        builder.record(r ** (k - 1), residual)
        if residual <= cfg.tol:
            status = Status.CONVERGED

    if status is None:
        logger.warning(f"r-Smith (r={r}) stopped after {cfg.max_outer} steps, residual {residual:.3e}")
        status = Status.MAX_ITERATIONS

    return c_hat, builder.build(status)
