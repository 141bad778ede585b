"""
Nonlinear matrix equation X = Q − A·X⁻¹·B.

The four-matrix state (A, B, P, Q) tracks the composite map
Q_k − A_k(X − P_k)⁻¹B_k; starting from (A, B, 0, Q) the Q-component
converges to a solution.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from ..engine.semigroup import SemigroupOperator, iterate
from ..errors import Breakdown, PreconditionViolation, SingularIterate, SingularMatrix
from ..models.config import SolverConfig
from ..models.report import ConvergenceReport, LemmaErrors
from ..models.states import NmeState, require_conforming
from ..services.matrixkit import (
    DenseMatrix,
    as_matrix,
    fro_norm,
    inverse,
    lu_factor,
    relative_difference,
    solve,
)

# Configure logging
logger = logging.getLogger(__name__)


def _delta(Q: DenseMatrix, P: DenseMatrix):
    try:
        return lu_factor(Q - P)
    except SingularMatrix as e:
        raise Breakdown("nme", e) from e


def nme_operator(xa: NmeState, xb: NmeState) -> NmeState:
    """
    F(X_a, X_b) with Δ = (Q_a − P_b)⁻¹:

        A = A_b·Δ·A_a    B = B_a·Δ·B_b
        P = P_a + B_a·Δ·A_a    Q = Q_b − A_b·Δ·B_b
    """
    require_conforming(xa, xb)
    delta = _delta(xa.Q, xb.P)
    delta_a = solve(delta, xa.A)
    delta_b = solve(delta, xb.B)
    return NmeState(
        A=xb.A @ delta_a,
        B=xa.B @ delta_b,
        P=xa.P + xa.B @ delta_a,
        Q=xb.Q - xb.A @ delta_b,
    )


def nme_residual(Q: DenseMatrix, A: DenseMatrix, B: DenseMatrix, X: DenseMatrix) -> float:
    """‖X − Q + A·X⁻¹·B‖_F / ‖Q‖_F; raises SingularIterate when X cannot be inverted."""
    try:
        factors = lu_factor(X)
    except SingularMatrix as e:
        raise SingularIterate(f"iterate X is numerically singular (rcond={e.rcond:.3e})") from e
    return fro_norm(X - Q + A @ solve(factors, B)) / max(fro_norm(Q), np.finfo(float).tiny)


class NmeOperator(SemigroupOperator[NmeState]):
    """Stops on the equation residual or on ‖Q_{k+1} − Q_k‖/‖Q_k‖ ≤ tol."""

    name = "nme"

    def __init__(self, Q: DenseMatrix, A: DenseMatrix, B: DenseMatrix):
        self.Q, self.A, self.B = Q, A, B

    def initial_state(self) -> NmeState:
        return NmeState(A=self.A, B=self.B, P=np.zeros_like(self.Q), Q=self.Q)

    def apply(self, xa: NmeState, xb: NmeState) -> NmeState:
        return nme_operator(xa, xb)

    def residual(self, x: NmeState) -> float:
        return nme_residual(self.Q, self.A, self.B, x.Q)

    def solution_view(self, x: NmeState) -> DenseMatrix:
        return x.Q

    def converged(self, previous: Optional[NmeState], current: NmeState, residual: float, tol: float) -> bool:
        if residual <= tol:
            return True
        if previous is None:
            return False
        return fro_norm(current.Q - previous.Q) / max(fro_norm(previous.Q), np.finfo(float).tiny) <= tol


def nme_solve(
    Q: DenseMatrix,
    A: DenseMatrix,
    B: DenseMatrix,
    cfg: SolverConfig,
) -> Tuple[DenseMatrix, ConvergenceReport]:
    """
    Solve X = Q − A·X⁻¹·B from the state (A, B, 0, Q).

    Args:
        Q: Nonsingular n×n matrix
        A: n×n coefficient
        B: n×n coefficient
        cfg: Solver configuration

    Returns:
        (X, report) with X the Q-component of the last accepted iterate
    """
    op = NmeOperator(as_matrix(Q), as_matrix(A), as_matrix(B))
    x1 = op.initial_state()
    try:
        lu_factor(op.Q)
    except SingularMatrix as e:
        raise PreconditionViolation(f"Q must be nonsingular (rcond={e.rcond:.3e})") from e

    logger.info(f"Solving X = Q - A X^-1 B, n={op.Q.shape[0]}, mode {cfg.mode.value}")
    final, report = iterate(op, x1, cfg)
    return final.Q, report


def _inv(m: DenseMatrix) -> DenseMatrix:
    try:
        return inverse(m)
    except SingularMatrix as e:
        raise Breakdown("nme", e) from e


def nme_lemma_suite(xa: NmeState, xb: NmeState, xc: NmeState) -> LemmaErrors:
    """
    Relative errors of the Δ identities behind associativity, with
    X_d = F(X_a, X_b) and X_e = F(X_b, X_c):

        Δ_ae = Δ_ab + Δ_ab·B_b·Δ_dc·A_b·Δ_ab
        Δ_dc = Δ_bc + Δ_bc·A_b·Δ_ae·B_b·Δ_bc
        Δ_ab·B_b·Δ_dc = Δ_ae·B_b·Δ_bc
        Δ_dc·A_b·Δ_ab = Δ_bc·A_b·Δ_ae
    """
    xd = nme_operator(xa, xb)
    xe = nme_operator(xb, xc)

    d_ab = _inv(xa.Q - xb.P)
    d_bc = _inv(xb.Q - xc.P)
    d_dc = _inv(xd.Q - xc.P)
    d_ae = _inv(xa.Q - xe.P)
    A, B = xb.A, xb.B

    return LemmaErrors(
        first=relative_difference(d_ae, d_ab + d_ab @ B @ d_dc @ A @ d_ab),
        second=relative_difference(d_dc, d_bc + d_bc @ A @ d_ae @ B @ d_bc),
        third=relative_difference(d_ab @ B @ d_dc, d_ae @ B @ d_bc),
        fourth=relative_difference(d_dc @ A @ d_ab, d_bc @ A @ d_ae),
    )
