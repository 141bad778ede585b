"""
Dense complex linear-algebra kernel used by every solver.
Factorizations come from LAPACK through scipy; every Δ application in the
operators goes through lu_factor/solve so no explicit inverse is ever formed.
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Any, List, Tuple

import numpy as np
import scipy.linalg as la
from numpy.typing import NDArray
from scipy.linalg import lapack

from ..errors import DimensionMismatch, EigenFailure, InvalidMatrix, SingularMatrix

# Configure logging
logger = logging.getLogger(__name__)

DenseMatrix = NDArray[np.complex128]

# Reciprocal condition numbers below this are treated as exact singularity
SINGULARITY_RCOND = 1e-14


@dataclass(frozen=True)
class LuFactors:
    """Pivoted LU factors of a square matrix plus its 1-norm rcond estimate."""
    lu: DenseMatrix
    piv: NDArray[np.int32]
    rcond: float

    @property
    def size(self) -> int:
        return self.lu.shape[0]


def promote(data: Any) -> DenseMatrix:
    """Promote scalars, vectors and arrays to a 2-D complex matrix (no finiteness check)."""
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(1, -1)
    elif m.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got {m.ndim} dimensions")

    if m.size == 0:
        raise InvalidMatrix("matrix has no entries")

    return m


def as_matrix(data: Any) -> DenseMatrix:
    """Promote input data to a DenseMatrix, rejecting NaN/Inf entries."""
    m = promote(data)
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix contains NaN or Inf entries")
    return m


def identity(n: int) -> DenseMatrix:
    return np.eye(n, dtype=np.complex128)


def require_square(m: DenseMatrix, what: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {m.shape}")
    return m.shape[0]


def _rcond_from_lu(lu: DenseMatrix, norm_a: float) -> float:
    """1-norm reciprocal condition estimate from LU factors (LAPACK gecon)."""
    if norm_a == 0.0 or np.any(np.diag(lu) == 0):
        return 0.0

    gecon = lapack.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, norm_a, norm="1")
    if info < 0:
        raise ValueError(f"gecon rejected argument {-info}")
    return float(rcond)


def lu_factor(m: DenseMatrix) -> LuFactors:
    """
    Factor a square matrix with partial pivoting.

    Args:
        m: Square matrix

    Returns:
        LuFactors: combined LU storage, pivots and rcond estimate

    Raises:
        SingularMatrix: if the rcond estimate is below SINGULARITY_RCOND
            (or the matrix has non-finite entries)
    """
    m = promote(m)
    require_square(m, "lu_factor operand")

    if not np.all(np.isfinite(m)):
        raise SingularMatrix(float("nan"), "matrix has non-finite entries")

    with warnings.catch_warnings():
        # exact zero pivots are reported through rcond instead
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(m, check_finite=False)

    rcond = _rcond_from_lu(lu, float(np.linalg.norm(m, 1)))
    if rcond < SINGULARITY_RCOND:
        raise SingularMatrix(rcond)

    return LuFactors(lu=lu, piv=piv, rcond=rcond)


def solve(factors: LuFactors, rhs: DenseMatrix) -> DenseMatrix:
    """Solve M·X = rhs given the LU factors of M."""
    rhs = promote(rhs)
    if rhs.shape[0] != factors.size:
        raise DimensionMismatch(
            f"right-hand side has {rhs.shape[0]} rows, factors are {factors.size}x{factors.size}"
        )
    return la.lu_solve((factors.lu, factors.piv), rhs, check_finite=False)


def inverse(m: DenseMatrix) -> DenseMatrix:
    """Explicit inverse; only used where an identity is checked entrywise."""
    factors = lu_factor(m)
    return solve(factors, identity(factors.size))


def smwf_inverse(U: DenseMatrix, B: DenseMatrix, V: DenseMatrix, A: DenseMatrix, sign: int = 1) -> DenseMatrix:
    """
    Inverse of U ± B·V·A by the Sherman–Morrison–Woodbury formula.

    (U ± BVA)⁻¹ = U⁻¹ ∓ U⁻¹B(V⁻¹ ± AU⁻¹B)⁻¹AU⁻¹

    Args:
        U: n×n matrix
        B: n×p matrix
        V: p×p matrix
        A: p×n matrix
        sign: +1 for U + BVA, −1 for U − BVA

    Returns:
        The n×n inverse

    Raises:
        SingularMatrix: if U, V or the capacitance matrix V⁻¹ ± AU⁻¹B is
            numerically singular
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    U, B, V, A = promote(U), promote(B), promote(V), promote(A)
    n = require_square(U, "U")
    p = require_square(V, "V")
    if B.shape != (n, p) or A.shape != (p, n):
        raise DimensionMismatch(f"B must be {n}x{p} and A {p}x{n}, got {B.shape} and {A.shape}")

    u_factors = lu_factor(U)
    u_inv_b = solve(u_factors, B)
    u_inv = solve(u_factors, identity(n))
    capacitance = lu_factor(inverse(V) + sign * A @ u_inv_b)
    return u_inv - sign * u_inv_b @ solve(capacitance, A @ u_inv)


def fro_norm(m: DenseMatrix) -> float:
    # Frobenius for matrices, 2-norm for vectors
    return float(np.linalg.norm(np.asarray(m)))


def relative_difference(reference: DenseMatrix, other: DenseMatrix) -> float:
    """‖reference − other‖_F / max(1, ‖reference‖_F)."""
    if np.shape(reference) != np.shape(other):
        raise DimensionMismatch(f"cannot compare shapes {np.shape(reference)} and {np.shape(other)}")
    return fro_norm(np.asarray(reference) - np.asarray(other)) / max(1.0, fro_norm(reference))


def hermitian_part(m: DenseMatrix) -> DenseMatrix:
    return 0.5 * (m + m.conj().T)


def spectral_radius(m: DenseMatrix) -> float:
    """Largest eigenvalue magnitude from a dense eigendecomposition."""
    m = promote(m)
    require_square(m, "spectral_radius operand")
    try:
        eigenvalues = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as e:
        raise EigenFailure(f"eigenvalue routine failed: {e}") from e
    return float(np.max(np.abs(eigenvalues)))


def singular_triplet_smallest(m: DenseMatrix, count: int) -> Tuple[List[float], DenseMatrix]:
    """
    Smallest singular values and their right singular vectors.

    Args:
        m: Any dense matrix
        count: How many of the smallest singular values to return (≤ cols)

    Returns:
        (values, V): values ascending, V with orthonormal columns matching them
    """
    m = promote(m)
    cols = m.shape[1]
    if count < 1 or count > cols:
        raise DimensionMismatch(f"count must be in [1, {cols}], got {count}")

    try:
        _, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as e:
        raise EigenFailure(f"SVD failed: {e}") from e

    # wide matrices have cols - rows implicit zero singular values
    padded = np.zeros(cols)
    padded[:s.size] = s

    picked = list(range(cols - 1, cols - 1 - count, -1))
    values = [float(padded[i]) for i in picked]
    vectors = vh[picked, :].conj().T
    return values, np.ascontiguousarray(vectors)


def singular_values(m: DenseMatrix) -> NDArray[np.float64]:
    """All singular values, ascending."""
    try:
        s = np.linalg.svd(promote(m), compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise EigenFailure(f"SVD failed: {e}") from e
    return np.sort(s)


def hermitian_eigenvalues(m: DenseMatrix) -> NDArray[np.float64]:
    """Eigenvalues of the Hermitian part of m, ascending."""
    m = promote(m)
    require_square(m, "hermitian_eigenvalues operand")
    try:
        return la.eigvalsh(hermitian_part(m), check_finite=False)
    except la.LinAlgError as e:
        raise EigenFailure(f"Hermitian eigenvalue routine failed: {e}") from e
