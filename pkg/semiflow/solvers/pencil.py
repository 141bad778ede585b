"""
Stable deflating subspace of a regular pencil A − λB.

The inverse-free iteration drives A_k U → 0 on the stable subspace U, so U is
read off as the right null space of the limit of A_k.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.linalg as la

from ..engine.semigroup import SemigroupOperator, iterate
from ..errors import Breakdown, DimensionMismatch, RankAmbiguity, SingularMatrix
from ..models.config import SolverConfig
from ..models.report import ConvergenceReport, Status
from ..models.states import PencilState, require_conforming
from ..services.matrixkit import (
    DenseMatrix,
    fro_norm,
    lu_factor,
    singular_triplet_smallest,
    singular_values,
    solve,
    spectral_radius,
)

# Configure logging
logger = logging.getLogger(__name__)

# Singular value m+1 of the limit must exceed singular value m by this factor
RANK_GAP = 1e2
# B_k growth beyond this multiple of ‖B_1‖ is flagged
B_GROWTH_LIMIT = 1e8


@dataclass(frozen=True)
class SubspaceResult:
    """Orthonormal basis U of the stable subspace with AU = BUΛ."""
    U: DenseMatrix
    Lambda: DenseMatrix
    residual: float
    report: ConvergenceReport
    max_b_norm: float
    b_growth_flag: bool

    @property
    def iterations(self) -> int:
        return self.report.outer_steps

    @property
    def status(self) -> Status:
        return self.report.status


def _factor_sum(A: DenseMatrix, B: DenseMatrix):
    try:
        return lu_factor(A + B)
    except SingularMatrix as e:
        raise Breakdown("pencil", e) from e


def pencil_operator(xa: PencilState, xb: PencilState) -> PencilState:
    """F(X_a, X_b) = (A_a·Δ·A_b, B_b·Δ·B_a) with Δ = (A_a + B_b)⁻¹."""
    require_conforming(xa, xb)
    delta = _factor_sum(xa.A, xb.B)
    return PencilState(A=xa.A @ solve(delta, xb.A), B=xb.B @ solve(delta, xa.B))


def pencil_operator_alt(xa: PencilState, xb: PencilState) -> PencilState:
    """Same operator written as (A_b − B_b·Δ·A_b, B_a − A_a·Δ·B_a)."""
    require_conforming(xa, xb)
    delta = _factor_sum(xa.A, xb.B)
    return PencilState(A=xb.A - xb.B @ solve(delta, xb.A), B=xa.B - xa.A @ solve(delta, xa.B))


def _invariant_fit(A: DenseMatrix, B: DenseMatrix, U: DenseMatrix):
    """Least-squares Λ for AU = BUΛ and the residual ‖AU − BUΛ‖_F/‖A‖_F."""
    AU, BU = A @ U, B @ U
    Lambda = la.lstsq(BU, AU)[0]
    scale = max(fro_norm(A), np.finfo(float).tiny)
    return Lambda, fro_norm(AU - BU @ Lambda) / scale


class PencilOperator(SemigroupOperator[PencilState]):
    """
    Pencil iteration for a stable subspace of dimension m.

    Stops on the relative change of A_k; when m equals the pencil size the
    limit is A_∞ = 0 and the decay ‖A_k‖/‖A_1‖ is used instead.
    """

    name = "pencil"

    def __init__(self, problem: PencilState, m: int):
        n = problem.A.shape[0]
        if not 1 <= m <= n:
            raise DimensionMismatch(f"subspace dimension m must be in [1, {n}], got {m}")
        self.problem = problem
        self.m = m
        self._a1_norm = max(fro_norm(problem.A), np.finfo(float).tiny)

    @property
    def full(self) -> bool:
        return self.m == self.problem.A.shape[0]

    def apply(self, xa: PencilState, xb: PencilState) -> PencilState:
        return pencil_operator(xa, xb)

    def basis(self, x: PencilState) -> DenseMatrix:
        _, U = singular_triplet_smallest(x.A, self.m)
        return U

    def residual(self, x: PencilState) -> float:
        _, residual = _invariant_fit(self.problem.A, self.problem.B, self.basis(x))
        return residual

    def solution_view(self, x: PencilState) -> DenseMatrix:
        return x.A

    def converged(self, previous: Optional[PencilState], current: PencilState, residual: float, tol: float) -> bool:
        if self.full:
            return fro_norm(current.A) / self._a1_norm <= tol
        if previous is None:
            return False
        change = fro_norm(current.A - previous.A) / max(fro_norm(previous.A), np.finfo(float).tiny)
        return change <= tol


def stable_subspace_solve(state: PencilState, m: int, cfg: SolverConfig) -> SubspaceResult:
    """
    Stable subspace of A − λB, assuming exactly m eigenvalues inside the unit circle.

    Args:
        state: The pencil (A, B)
        m: Dimension of the stable subspace
        cfg: Solver configuration (plain or accelerated)

    Returns:
        SubspaceResult with U, Λ, the residual ‖AU − BUΛ‖_F/‖A‖_F and the
        iteration report

    Raises:
        RankAmbiguity: if the converged A_k shows no clear gap after its m
            smallest singular values
    """
    op = PencilOperator(state, m)
    b1_norm = fro_norm(state.B)
    b_norms: List[float] = []

    def watch_b(k: int, current: PencilState) -> None:
        b_norms.append(fro_norm(current.B))

    logger.info(f"Computing {m}-dimensional stable subspace of a {state.A.shape[0]}x{state.A.shape[0]} pencil")
    final, report = iterate(op, state, cfg, on_step=watch_b)

    max_b_norm = max(b_norms) if b_norms else b1_norm
    b_growth_flag = max_b_norm > B_GROWTH_LIMIT * max(b1_norm, np.finfo(float).tiny)
    if b_growth_flag:
        logger.warning(f"B_k grew to {max_b_norm:.3e} (||B_1|| = {b1_norm:.3e}); B_k may be unbounded")

    if report.status == Status.CONVERGED and not op.full:
        s = singular_values(final.A)
        if not s[m] > RANK_GAP * s[m - 1]:
            raise RankAmbiguity(
                f"no singular value gap after position {m}: s[{m}]={s[m - 1]:.3e}, s[{m + 1}]={s[m]:.3e}"
            )

    U = op.basis(final)
    Lambda, residual = _invariant_fit(state.A, state.B, U)
    if report.status == Status.CONVERGED and spectral_radius(Lambda) >= 1:
        logger.warning(f"Recovered Lambda has spectral radius {spectral_radius(Lambda):.4g} >= 1; check m")

    return SubspaceResult(
        U=U,
        Lambda=Lambda,
        residual=residual,
        report=report,
        max_b_norm=max_b_norm,
        b_growth_flag=bool(b_growth_flag),
    )


def principal_angles(U: DenseMatrix, V: DenseMatrix) -> List[float]:
    """Principal angles between span(U) and span(V), descending."""
    U = np.asarray(U, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    U = U.reshape(-1, 1) if U.ndim == 1 else U
    V = V.reshape(-1, 1) if V.ndim == 1 else V
    if U.shape[0] != V.shape[0]:
        raise DimensionMismatch(f"ambient dimensions differ: {U.shape[0]} and {V.shape[0]}")
    return [float(angle) for angle in la.subspace_angles(U, V)]
