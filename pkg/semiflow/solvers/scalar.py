"""
Scalar and 2-vector problems with closed-form solutions.

Each problem has a direct scalar path (plain complex arithmetic and the closed
forms) and a matrix path (a SemigroupOperator over 1×1 states run through the
generic engine). The two paths are compared in the test and check suites.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import Breakdown, DegenerateCoefficient, DimensionMismatch, PreconditionViolation
from ..engine.semigroup import SemigroupOperator
from ..models.states import MatrixState
from ..services.matrixkit import DenseMatrix, solve

# Configure logging
logger = logging.getLogger(__name__)

# Relative size below which a denominator counts as zero
BREAKDOWN_RTOL = 1e-14


def _is_zero(value: complex, scale: float) -> bool:
    return abs(value) <= BREAKDOWN_RTOL * max(scale, np.finfo(float).tiny)


def scalar_of(m: DenseMatrix) -> complex:
    """The single entry of a 1×1 matrix."""
    return complex(m[0, 0])


# Problems

@dataclass(frozen=True)
class LinearScalarProblem:
    """x = a·x + b started from x1."""
    a: complex
    b: complex
    x1: complex = 0j

    def __post_init__(self):
        if abs(self.a) >= 1:
            logger.warning(f"Linear problem has |a| = {abs(self.a):.3g} >= 1; iteration will not contract")

    @property
    def fixed_point(self) -> complex:
        if self.a == 1:
            raise DegenerateCoefficient("a = 1 has no unique fixed point")
        return self.b / (1 - self.a)


@dataclass(frozen=True)
class RationalScalarProblem:
    """x = b·x / (b + x − a), iterated from x1 = b."""
    a: complex
    b: complex

    def __post_init__(self):
        if self.b == 0:
            raise PreconditionViolation("rational problem needs b != 0")
        if self.a == self.b:
            raise PreconditionViolation("rational problem needs a != b")


@dataclass(frozen=True)
class PairProblem:
    """[x, y] = [x1·x/(x1 + y), y1·y/(x1 + y)], iterated from (x1, y1)."""
    x1: complex
    y1: complex

    def __post_init__(self):
        if self.x1 * self.y1 == 0:
            raise PreconditionViolation("pair problem needs x1·y1 != 0")


# Linear x = ax + b

def linear_accel_step(a_k: complex, b_k: complex, r: int) -> Tuple[complex, complex]:
    """
    Advance the coefficients of x̂_{k+1} = a_k·x̂_k + b_k by one accelerated step.

    Args:
        a_k: Current slope (must differ from 1)
        b_k: Current offset
        r: Acceleration order

    Returns:
        (a_k^r, b_k·(1 − a_k^r)/(1 − a_k))
    """
    if r < 2:
        raise ValueError(f"order r must be at least 2, got {r}")
    if a_k == 1:
        raise DegenerateCoefficient("coefficient recursion needs a_k != 1")

    a_next = complex(a_k) ** r
    b_next = complex(b_k) * (1 - a_next) / (1 - a_k)
    return a_next, b_next


def linear_plain_sequence(prob: LinearScalarProblem, count: int) -> List[complex]:
    """x_1, ..., x_count of x_{k+1} = a·x_k + b."""
    values = [complex(prob.x1)]
    while len(values) < count:
        values.append(prob.a * values[-1] + prob.b)
    return values


def linear_accelerated_sequence(prob: LinearScalarProblem, r: int, count: int) -> List[complex]:
    """
    x̂_1, ..., x̂_count of the order-r accelerated linear iteration, x̂_k = x_{r^{k-1}}.

    The first step uses a_1 = a^{r−1} and b_1 = b(1 − a^{r−1})/(1 − a); later
    steps advance the coefficients with linear_accel_step.
    """
    if prob.a == 1:
        raise DegenerateCoefficient("coefficient recursion needs a != 1")

    a_k = complex(prob.a) ** (r - 1)
    b_k = complex(prob.b) * (1 - a_k) / (1 - prob.a)

    values = [complex(prob.x1)]
    while len(values) < count:
        values.append(a_k * values[-1] + b_k)
        a_k, b_k = linear_accel_step(a_k, b_k, r)
    return values


def linear_exact_error(prob: LinearScalarProblem, r: int, k: int) -> float:
    """|x̂_k − x*| = |a|^{r^{k−1}−1}·|x_1 − x*|."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    start = abs(prob.x1 - prob.fixed_point)
    exponent = r ** (k - 1) - 1
    return float(abs(prob.a) ** exponent * start)


def linear_q_constant(prob: LinearScalarProblem, r: int) -> float:
    """Limit of |x̂_{k+1} − x*| / |x̂_k − x*|^r for the accelerated linear iteration."""
    start = abs(prob.x1 - prob.fixed_point)
    if start == 0:
        raise DegenerateCoefficient("x1 is already the fixed point")
    return float(abs(prob.a) ** (r - 1) / start ** (r - 1))


# Rational x = bx/(b + x − a)

def rational_g(x: complex, y: complex, a: complex) -> complex:
    """g(x, y) = y·x/(y + x − a)."""
    denominator = y + x - a
    if _is_zero(denominator, abs(x) + abs(y) + abs(a)):
        raise Breakdown("rational", message=f"y + x − a vanishes at x={x}, y={y}")
    return y * x / denominator


def rational_h(x: complex, a: complex, r: int) -> complex:
    """
    r-fold composition h_r(x) = a·x^r / (x^r − (x − a)^r), or x/r when a = 0.

    Raises:
        Breakdown: if x^r = (x − a)^r with a != 0
    """
    if r < 2:
        raise ValueError(f"order r must be at least 2, got {r}")
    if a == 0:
        return complex(x) / r

    power = complex(x) ** r
    shifted = complex(x - a) ** r
    denominator = power - shifted
    if _is_zero(denominator, max(abs(power), abs(shifted))):
        raise Breakdown("rational", message=f"x^r = (x − a)^r at x={x}, a={a}, r={r}")
    return a * power / denominator


def rational_closed_form(y1: complex, a: complex, r: int, k: int) -> complex:
    """y_k of the accelerated rational sequence: a + a/((y1/(y1 − a))^{r^{k−1}} − 1)."""
    n = r ** (k - 1)
    if a == 0:
        return complex(y1) / n
    if y1 == a:
        raise Breakdown("rational", message="y1 = a")

    ratio = complex(y1) / (y1 - a)
    try:
        grown = ratio ** n
    except OverflowError:
        return complex(a)

    denominator = grown - 1
    if _is_zero(denominator, abs(grown)):
        raise Breakdown("rational", message=f"(y1/(y1 − a))^{n} = 1")
    return a + a / denominator


def rational_limit(x1: complex, a: complex) -> Optional[complex]:
    """
    Limit of the rational iteration from x1: 0 when |x1/(x1 − a)| < 1, a when > 1.

    Returns None on the unit circle (a != 0), where no limit is classified.
    """
    if a == 0:
        return 0j
    q = abs(x1 / (x1 - a))
    if abs(q - 1) <= 1e-12:
        return None
    return 0j if q < 1 else complex(a)


# Pair [x, y]

def pair_G(za: Tuple[complex, complex], zb: Tuple[complex, complex]) -> Tuple[complex, complex]:
    """G(Z_a, Z_b) = (x_b·x_a, y_b·y_a)/(x_b + y_a)."""
    xa, ya = za
    xb, yb = zb
    denominator = xb + ya
    if _is_zero(denominator, abs(xb) + abs(ya)):
        raise Breakdown("pair", message=f"x_b + y_a vanishes at {zb}, {za}")
    return xb * xa / denominator, yb * ya / denominator


def pair_H(x: complex, y: complex, r: int) -> Tuple[complex, complex]:
    """Accelerated pair step (x^r, y^r)/Σ_{j<r} x^j y^{r−1−j}."""
    if r < 2:
        raise ValueError(f"order r must be at least 2, got {r}")

    terms = [complex(x) ** j * complex(y) ** (r - 1 - j) for j in range(r)]
    denominator = sum(terms)
    if _is_zero(denominator, sum(abs(t) for t in terms)):
        raise Breakdown("pair", message=f"Σ x^j y^(r−1−j) vanishes at x={x}, y={y}, r={r}")
    return complex(x) ** r / denominator, complex(y) ** r / denominator


def pair_closed_form(x1: complex, y1: complex, r: int, k: int) -> Tuple[complex, complex]:
    """Ẑ_k = (x1 − y1)/(x1^N − y1^N)·(x1^N, y1^N) with N = r^{k−1}; (x1/N, x1/N) when x1 = y1."""
    n = r ** (k - 1)
    if x1 == y1:
        return complex(x1) / n, complex(y1) / n

    # powers of the ratio of the smaller to the larger base stay bounded
    x1, y1 = complex(x1), complex(y1)
    swap = abs(y1) > abs(x1)
    big, small = (y1, x1) if swap else (x1, y1)
    ratio = small / big
    try:
        tail = ratio ** n
    except OverflowError:
        # n beyond float range
        if abs(ratio) == 1:
            raise Breakdown("pair", message=f"cannot raise a unit-modulus ratio to the power {n}")
        tail = 0j
    denominator = 1 - tail
    if _is_zero(denominator, 1.0):
        raise Breakdown("pair", message=f"x1^{n} = y1^{n}")

    lead = (big - small) / denominator
    return (lead * tail, lead) if swap else (lead, lead * tail)


def pair_limit(x1: complex, y1: complex) -> Optional[Tuple[complex, complex]]:
    """(x1 − y1, 0) when |y1/x1| < 1, (0, y1 − x1) when > 1, (0, 0) when x1 = y1."""
    if x1 == y1:
        return 0j, 0j
    q = abs(y1 / x1)
    if abs(q - 1) <= 1e-12:
        return None
    return (complex(x1 - y1), 0j) if q < 1 else (0j, complex(y1 - x1))


# Matrix path: semigroup operators over 1×1 states

def _require_scalar(state: MatrixState) -> None:
    for name, value in state.components().items():
        if value.shape != (1, 1):
            raise DimensionMismatch(f"{type(state).__name__}.{name} must be 1x1, got {value.shape}")


@dataclass(frozen=True, eq=False)
class LinearScalarState(MatrixState):
    """(α, β, x): the affine map z ↦ αz + β reached so far, and its image of x1."""
    alpha: DenseMatrix
    beta: DenseMatrix
    x: DenseMatrix

    def __post_init__(self):
        self._coerce()
        _require_scalar(self)


@dataclass(frozen=True, eq=False)
class RationalScalarState(MatrixState):
    y: DenseMatrix

    def __post_init__(self):
        self._coerce()
        _require_scalar(self)


@dataclass(frozen=True, eq=False)
class PairState(MatrixState):
    x: DenseMatrix
    y: DenseMatrix

    def __post_init__(self):
        self._coerce()
        _require_scalar(self)


class LinearScalarOperator(SemigroupOperator[LinearScalarState]):
    """Composition of affine maps; X_k = (a^k, b(1 − a^k)/(1 − a), x_k)."""

    name = "scalar-linear"

    def __init__(self, problem: LinearScalarProblem):
        self.problem = problem

    def initial_state(self) -> LinearScalarState:
        return LinearScalarState(self.problem.a, self.problem.b, self.problem.x1)

    def apply(self, xa: LinearScalarState, xb: LinearScalarState) -> LinearScalarState:
        return LinearScalarState(
            alpha=xa.alpha @ xb.alpha,
            beta=xb.alpha @ xa.beta + xb.beta,
            x=xb.alpha @ xa.x + xb.beta,
        )

    def residual(self, x: LinearScalarState) -> float:
        value = scalar_of(x.x)
        return abs(value - self.problem.a * value - self.problem.b) / max(1.0, abs(self.problem.b))

    def solution_view(self, x: LinearScalarState) -> DenseMatrix:
        return x.x


class RationalScalarOperator(SemigroupOperator[RationalScalarState]):
    """g(x_a, x_b) = x_b·x_a/(x_b + x_a − a), with Δ applied through an LU solve."""

    name = "scalar-rational"

    def __init__(self, problem: RationalScalarProblem):
        self.problem = problem

    def initial_state(self) -> RationalScalarState:
        return RationalScalarState(self.problem.b)

    def apply(self, xa: RationalScalarState, xb: RationalScalarState) -> RationalScalarState:
        delta = self.factor(xb.y + xa.y - self.problem.a)
        return RationalScalarState(xb.y @ solve(delta, xa.y))

    def residual(self, x: RationalScalarState) -> float:
        value = scalar_of(x.y)
        denominator = self.problem.b + value - self.problem.a
        if denominator == 0:
            return float("inf")
        return abs(value * (value - self.problem.a) / denominator)

    def solution_view(self, x: RationalScalarState) -> DenseMatrix:
        return x.y


class PairOperator(SemigroupOperator[PairState]):
    name = "scalar-pair"

    def __init__(self, problem: PairProblem):
        self.problem = problem

    def initial_state(self) -> PairState:
        return PairState(self.problem.x1, self.problem.y1)

    def apply(self, xa: PairState, xb: PairState) -> PairState:
        delta = self.factor(xb.x + xa.y)
        return PairState(xb.x @ solve(delta, xa.x), xb.y @ solve(delta, xa.y))

    def residual(self, x: PairState) -> float:
        xv, yv = scalar_of(x.x), scalar_of(x.y)
        denominator = self.problem.x1 + yv
        if denominator == 0:
            return float("inf")
        return max(
            abs(xv - self.problem.x1 * xv / denominator),
            abs(yv - self.problem.y1 * yv / denominator),
        )

    def solution_view(self, x: PairState) -> DenseMatrix:
        return np.array([[scalar_of(x.x), scalar_of(x.y)]], dtype=np.complex128)
