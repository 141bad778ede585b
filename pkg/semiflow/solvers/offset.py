"""
Matrix analogue of the rational scalar iteration: F(X, Y) = X(A + X + Y)⁻¹Y.
"""
import logging
from dataclasses import dataclass

from ..errors import Breakdown, DimensionMismatch, SingularMatrix
from ..engine.semigroup import SemigroupOperator
from ..models.report import LemmaErrors
from ..models.states import MatrixState
from ..services.matrixkit import (
    DenseMatrix,
    as_matrix,
    fro_norm,
    inverse,
    relative_difference,
    require_square,
    smwf_inverse,
    solve,
)

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OffsetState(MatrixState):
    X: DenseMatrix

    def __post_init__(self):
        self._coerce()
        self._require_square("X")


class OffsetProductOperator(SemigroupOperator[OffsetState]):
    """
    F(X, Y) = X·Δ_{X,Y}·Y with Δ_{X,Y} = (A + X + Y)⁻¹.

    Iterating X_{k+1} = F(X_k, X_1) solves X = X(A + X + X_1)⁻¹X_1; with
    A = −a·I and X_1 = b·I this is the scalar x = bx/(b + x − a) on the diagonal.
    """

    name = "offset-product"

    def __init__(self, A: DenseMatrix, X1: DenseMatrix):
        self.A = as_matrix(A)
        self.X1 = as_matrix(X1)
        n = require_square(self.A, "A")
        if self.X1.shape != (n, n):
            raise DimensionMismatch(f"X1 must be {n}x{n} like A, got {self.X1.shape}")

    def initial_state(self) -> OffsetState:
        return OffsetState(self.X1)

    def apply(self, xa: OffsetState, xb: OffsetState) -> OffsetState:
        delta = self.factor(self.A + xa.X + xb.X)
        return OffsetState(xa.X @ solve(delta, xb.X))

    def residual(self, x: OffsetState) -> float:
        delta = self.factor(self.A + x.X + self.X1)
        return fro_norm(x.X - x.X @ solve(delta, self.X1)) / max(1.0, fro_norm(x.X))

    def solution_view(self, x: OffsetState) -> DenseMatrix:
        return x.X


def _inv(m: DenseMatrix) -> DenseMatrix:
    try:
        return inverse(m)
    except SingularMatrix as e:
        raise Breakdown(OffsetProductOperator.name, e) from e


def offset_lemma_suite(A: DenseMatrix, x: OffsetState, y: OffsetState, z: OffsetState) -> LemmaErrors:
    """
    Relative errors of the Δ identities behind associativity of X(A + X + Y)⁻¹Y:

        Δ_{X,F(Y,Z)} = Δ_{X,Y} + Δ_{X,Y}·Y·Δ_{F(X,Y),Z}·(A + Y)·Δ_{X,Y}
        Δ_{F(X,Y),Z} = Δ_{Y,Z} + Δ_{Y,Z}·(A + Y)·Δ_{X,F(Y,Z)}·Y·Δ_{Y,Z}
        Δ_{X,F(Y,Z)}·Y·Δ_{Y,Z} = Δ_{X,Y}·Y·Δ_{F(X,Y),Z}

    The fourth entry compares Δ_{X,F(Y,Z)} = (A + X + Y·Δ_{Y,Z}·Z)⁻¹ with its
    Sherman–Morrison–Woodbury evaluation around U = A + X.
    """
    A = as_matrix(A)
    X, Y, Z = x.X, y.X, z.X
    d_xy = _inv(A + X + Y)
    d_yz = _inv(A + Y + Z)
    d_x_yz = _inv(A + X + Y @ d_yz @ Z)
    d_xy_z = _inv(A + X @ d_xy @ Y + Z)
    shifted = A + Y

    try:
        woodbury = smwf_inverse(A + X, Y, d_yz, Z, sign=1)
    except SingularMatrix as e:
        raise Breakdown(OffsetProductOperator.name, e) from e

    return LemmaErrors(
        first=relative_difference(d_x_yz, d_xy + d_xy @ Y @ d_xy_z @ shifted @ d_xy),
        second=relative_difference(d_xy_z, d_yz + d_yz @ shifted @ d_x_yz @ Y @ d_yz),
        third=relative_difference(d_x_yz @ Y @ d_yz, d_xy @ Y @ d_xy_z),
        fourth=relative_difference(d_x_yz, woodbury),
    )
