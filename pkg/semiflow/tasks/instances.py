"""
Seeded random problem builders shared by the check suites, the example
problem writer and the tests.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..models.states import DareState, NmeState, PencilState, SteinState
from ..services.matrixkit import DenseMatrix, inverse, spectral_radius


def random_matrix(rng: np.random.Generator, rows: int, cols: Optional[int] = None, complex_entries: bool = False) -> DenseMatrix:
    """Gaussian entries scaled by 1/√rows."""
    cols = rows if cols is None else cols
    m = rng.standard_normal((rows, cols))
    if complex_entries:
        m = (m + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
    return (m / np.sqrt(rows)).astype(np.complex128)


def orthogonal_matrix(rng: np.random.Generator, n: int) -> DenseMatrix:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return (q * np.sign(np.diag(r))).astype(np.complex128)


def with_spectral_radius(m: DenseMatrix, rho: float) -> DenseMatrix:
    return m * (rho / spectral_radius(m))


def near_identity(rng: np.random.Generator, n: int, spread: float = 0.15) -> DenseMatrix:
    """I + spread·E; well conditioned for the spreads used here."""
    return np.eye(n, dtype=np.complex128) + spread * rng.standard_normal((n, n))


def hermitian_psd(rng: np.random.Generator, n: int, scale: float = 1.0, complex_entries: bool = False) -> DenseMatrix:
    """scale·MᴴM for a random M."""
    m = random_matrix(rng, n, complex_entries=complex_entries)
    return scale * (m.conj().T @ m)


# Stein

def random_stein(rng: np.random.Generator, m: int, n: Optional[int] = None, rho_product: float = 0.8) -> SteinState:
    """Random (A, B, C) with ρ(A) = ρ(B) = √rho_product."""
    n = m if n is None else n
    side = np.sqrt(rho_product)
    A = with_spectral_radius(random_matrix(rng, m), side)
    B = with_spectral_radius(random_matrix(rng, n), side)
    return SteinState(A, B, random_matrix(rng, m, n))


def stein_benchmark(rng: np.random.Generator, n: int = 8, rho_product: float = 0.8) -> SteinState:
    """
    Symmetric A, B with ρ(A)ρ(B) = rho_product and C concentrated on the
    dominant eigenvector pair, so the Smith residual decays like rho_product^k.
    """
    side = np.sqrt(rho_product)
    U = orthogonal_matrix(rng, n)
    V = orthogonal_matrix(rng, n)
    A = U @ np.diag(side * np.linspace(1.0, 0.1, n)) @ U.T
    B = V @ np.diag(side * np.linspace(1.0, 0.2, n)) @ V.T
    C = np.outer(U[:, 0], V[:, 0]) + 0.05 * random_matrix(rng, n)
    return SteinState(A, B, C)


def stein_series(problem: SteinState, terms: int) -> DenseMatrix:
    """Σ_{i<terms} AⁱCBⁱ."""
    total = np.zeros_like(problem.C)
    term = problem.C
    for _ in range(terms):
        total = total + term
        term = problem.A @ term @ problem.B
    return total


# Pencil

@dataclass(frozen=True)
class PencilInstance:
    state: PencilState
    stable_basis: DenseMatrix
    m: int


def conjugated_pencil(rng: np.random.Generator, eigenvalues: Sequence[float], spread: float = 0.15) -> PencilInstance:
    """
    A = S·D·T⁻¹, B = S·T⁻¹ with D = diag(eigenvalues); the right deflating
    subspace of the eigenvalues inside the unit circle is spanned by the
    matching columns of T.
    """
    n = len(eigenvalues)
    S = near_identity(rng, n, spread)
    T = near_identity(rng, n, spread)
    T_inv = inverse(T)
    A = S @ np.diag(np.asarray(eigenvalues, dtype=np.complex128)) @ T_inv
    B = S @ T_inv

    stable = [i for i, value in enumerate(eigenvalues) if abs(value) < 1]
    basis, _ = np.linalg.qr(T[:, stable])
    return PencilInstance(PencilState(A, B), basis, len(stable))


def random_pencil_state(rng: np.random.Generator, n: int) -> PencilState:
    """A ≈ 2I, B ≈ I, so every A_a + B_b met in a short composition is well conditioned."""
    return PencilState(
        2 * np.eye(n) + 0.3 * random_matrix(rng, n),
        np.eye(n) + 0.3 * random_matrix(rng, n),
    )


# NME

def random_nme_state(rng: np.random.Generator, n: int, with_p: bool = True) -> NmeState:
    """Q ≈ 3I with small A, B and P; Q_a − P_b stays well conditioned."""
    P = 0.2 * random_matrix(rng, n) if with_p else np.zeros((n, n))
    return NmeState(
        A=0.5 * random_matrix(rng, n),
        B=0.5 * random_matrix(rng, n),
        P=P,
        Q=3 * np.eye(n) + 0.3 * random_matrix(rng, n),
    )


@dataclass(frozen=True)
class NmeInstance:
    Q: DenseMatrix
    A: DenseMatrix
    B: DenseMatrix
    X: DenseMatrix


def constructed_nme(rng: np.random.Generator, n: int, scale: float = 0.2) -> NmeInstance:
    """Pick X SPD with eigenvalues in [2, 3], small A, B, and set Q = X + AX⁻¹B."""
    V = orthogonal_matrix(rng, n)
    X = V @ np.diag(rng.uniform(2.0, 3.0, n)) @ V.conj().T
    X = 0.5 * (X + X.conj().T)
    A = scale * random_matrix(rng, n)
    B = scale * random_matrix(rng, n)
    Q = X + A @ inverse(X) @ B
    return NmeInstance(Q=Q, A=A, B=B, X=X)


# DARE

def random_dare_state(
    rng: np.random.Generator,
    n: int,
    rho: float = 0.9,
    scale: float = 0.5,
    complex_entries: bool = False,
) -> DareState:
    """A with ρ(A) = rho, G = scale·MᴴM and H = scale·NᴴN."""
    A = with_spectral_radius(random_matrix(rng, n, complex_entries=complex_entries), rho)
    return DareState(
        A=A,
        G=hermitian_psd(rng, n, scale, complex_entries),
        H=hermitian_psd(rng, n, scale, complex_entries),
    )


def state_triple(builder, rng: np.random.Generator, n: int) -> Tuple:
    return builder(rng, n), builder(rng, n), builder(rng, n)
