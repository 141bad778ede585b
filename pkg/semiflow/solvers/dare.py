"""
Discrete-time algebraic Riccati equation X = H + Aᴴ·X·(I + G·X)⁻¹·A.

The state (A, G, H) tracks the composite map H_k + A_kᴴX(I + G_kX)⁻¹A_k;
the H-component converges to the solution. Order-2 acceleration of this
operator is the structure-preserving doubling algorithm.
"""
import logging
from typing import Tuple

import numpy as np

from ..engine.semigroup import SemigroupOperator, iterate
from ..errors import Breakdown, PreconditionViolation, SingularMatrix
from ..models.config import SolverConfig
from ..models.report import ConvergenceReport, LemmaErrors
from ..models.states import DareState, require_conforming
from ..services.matrixkit import (
    DenseMatrix,
    as_matrix,
    fro_norm,
    hermitian_eigenvalues,
    hermitian_part,
    identity,
    inverse,
    lu_factor,
    relative_difference,
    solve,
)

# Configure logging
logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12


def _delta(G: DenseMatrix, H: DenseMatrix):
    try:
        return lu_factor(identity(G.shape[0]) + G @ H)
    except SingularMatrix as e:
        raise Breakdown("dare", e) from e


def dare_operator(xa: DareState, xb: DareState, symmetrize: bool = True) -> DareState:
    """
    F(X_a, X_b) with Δ = (I + G_a·H_b)⁻¹:

        A = A_b·Δ·A_a
        G = G_b + A_b·Δ·G_a·A_bᴴ
        H = H_a + A_aᴴ·H_b·Δ·A_a

    G and H are replaced by their Hermitian parts unless symmetrize is False.
    """
    require_conforming(xa, xb)
    delta = _delta(xa.G, xb.H)
    delta_a = solve(delta, xa.A)

    G = xb.G + xb.A @ solve(delta, xa.G @ xb.A.conj().T)
    H = xa.H + xa.A.conj().T @ xb.H @ delta_a
    if symmetrize:
        G, H = hermitian_part(G), hermitian_part(H)

    return DareState(A=xb.A @ delta_a, G=G, H=H)


def dare_residual(problem: DareState, X: DenseMatrix) -> float:
    """‖X − H − AᴴX(I + GX)⁻¹A‖_F / max(1, ‖H‖_F)."""
    factors = _delta(problem.G, X)
    update = problem.A.conj().T @ X @ solve(factors, problem.A)
    return fro_norm(X - problem.H - update) / max(1.0, fro_norm(problem.H))


class DareOperator(SemigroupOperator[DareState]):
    name = "dare"

    def __init__(self, problem: DareState, symmetrize: bool = True):
        self.problem = problem
        self.symmetrize = symmetrize

    def apply(self, xa: DareState, xb: DareState) -> DareState:
        return dare_operator(xa, xb, self.symmetrize)

    def residual(self, x: DareState) -> float:
        return dare_residual(self.problem, x.H)

    def solution_view(self, x: DareState) -> DenseMatrix:
        return x.H


def _check_psd(name: str, m: DenseMatrix) -> DenseMatrix:
    """Reject non-Hermitian input, warn on indefinite or singular input, return the Hermitian part."""
    if relative_difference(m, m.conj().T) > HERMITIAN_TOL:
        raise PreconditionViolation(f"{name} must be Hermitian")

    sym = hermitian_part(m)
    eigenvalues = hermitian_eigenvalues(sym)
    floor = HERMITIAN_TOL * max(1.0, float(np.max(np.abs(eigenvalues))))
    if eigenvalues[0] < -floor:
        logger.warning(f"{name} is indefinite (smallest eigenvalue {eigenvalues[0]:.3e}); breakdown is possible")
    elif eigenvalues[0] <= floor:
        logger.warning(f"{name} is positive semidefinite but singular")
    return sym


def dare_solve(
    A: DenseMatrix,
    G: DenseMatrix,
    H: DenseMatrix,
    cfg: SolverConfig,
) -> Tuple[DenseMatrix, ConvergenceReport]:
    """
    Solve X = H + AᴴX(I + GX)⁻¹A.

    Plain mode is the fixed-point iteration H_{k+1} = F(X_k, X_1)_H; accelerated
    mode with order 2 is the doubling algorithm.

    Args:
        A: n×n state matrix
        G: Hermitian positive semidefinite n×n matrix
        H: Hermitian positive semidefinite n×n matrix
        cfg: Solver configuration

    Returns:
        (X, report) with X the H-component of the last accepted iterate
    """
    A = as_matrix(A)
    problem = DareState(A=A, G=_check_psd("G", as_matrix(G)), H=_check_psd("H", as_matrix(H)))

    logger.info(f"Solving DARE, n={A.shape[0]}, mode {cfg.mode.value}, order {cfg.order}")
    final, report = iterate(DareOperator(problem), problem, cfg)
    return final.H, report


def _inv(m: DenseMatrix) -> DenseMatrix:
    try:
        return inverse(m)
    except SingularMatrix as e:
        raise Breakdown("dare", e) from e


def dare_lemma_suite(xa: DareState, xb: DareState, xc: DareState) -> LemmaErrors:
    """
    Relative errors of the Δ identities behind associativity, with
    X_d = F(X_a, X_b), X_e = F(X_b, X_c) and W = G_a·A_bᴴ·H_c:

        Δ_ae = Δ_ab − Δ_ab·W·Δ_dc·A_b·Δ_ab
        Δ_dc = Δ_bc − Δ_bc·A_b·Δ_ae·W·Δ_bc
        Δ_ab·W·Δ_dc = Δ_ae·W·Δ_bc
        Δ_dc·A_b·Δ_ab = Δ_bc·A_b·Δ_ae

    The compositions are taken without re-Hermitianization.
    """
    xd = dare_operator(xa, xb, symmetrize=False)
    xe = dare_operator(xb, xc, symmetrize=False)
    eye = identity(xa.A.shape[0])

    d_ab = _inv(eye + xa.G @ xb.H)
    d_bc = _inv(eye + xb.G @ xc.H)
    d_dc = _inv(eye + xd.G @ xc.H)
    d_ae = _inv(eye + xa.G @ xe.H)
    A = xb.A
    W = xa.G @ A.conj().T @ xc.H

    return LemmaErrors(
        first=relative_difference(d_ae, d_ab - d_ab @ W @ d_dc @ A @ d_ab),
        second=relative_difference(d_dc, d_bc - d_bc @ A @ d_ae @ W @ d_bc),
        third=relative_difference(d_ab @ W @ d_dc, d_ae @ W @ d_bc),
        fourth=relative_difference(d_dc @ A @ d_ab, d_bc @ A @ d_ae),
    )
