"""
Generic semigroup-iteration engine.

An operator F with F(F(X,Y),Z) = F(X,F(Y,Z)) drives the plain iteration
X_{k+1} = F(X_k, X_1) and, because X_{i+j} = F(X_i, X_j), the order-r
accelerated iteration whose k-th iterate is X_{r^{k-1}}.
"""
import logging
import time
from abc import ABC, abstractmethod
from typing import Callable, ClassVar, Generic, Iterator, List, Optional, Tuple, TypeVar

from ..errors import Breakdown, SingularMatrix
from ..models.config import SolverConfig
from ..models.report import ConvergenceReport, Status
from ..models.states import MatrixState, require_conforming, state_distance
from ..services.matrixkit import DenseMatrix, LuFactors, lu_factor
from .order import order_or_none

# Configure logging
logger = logging.getLogger(__name__)

S = TypeVar("S", bound=MatrixState)

StepCallback = Callable[[int, MatrixState], None]


class SemigroupOperator(ABC, Generic[S]):
    """Binary operator on iteration states, plus the equation it solves."""

    name: ClassVar[str] = "semigroup"

    @abstractmethod
    def apply(self, xa: S, xb: S) -> S:
        """F(xa, xb); raises Breakdown when a required Δ is singular."""

    @abstractmethod
    def residual(self, x: S) -> float:
        """Distance of the state's solution candidate from solving the equation."""

    @abstractmethod
    def solution_view(self, x: S) -> DenseMatrix:
        """The component that converges to the answer."""

    def converged(self, previous: Optional[S], current: S, residual: float, tol: float) -> bool:
        return residual <= tol

    def factor(self, m: DenseMatrix) -> LuFactors:
        """LU of a Δ⁻¹ block, turning singularity into operator breakdown."""
        try:
            return lu_factor(m)
        except SingularMatrix as e:
            raise Breakdown(self.name, e) from e


class ReportBuilder:
    """Accumulates residual rows while a driver runs."""

    def __init__(self, order: int = 1):
        self.order = order
        self.residuals: List[float] = []
        self.indices: List[int] = []
        self.elapsed: List[int] = []
        self.applies = 0
        self._start = time.perf_counter_ns()

    def record(self, index: int, residual: float) -> None:
        self.residuals.append(float(residual))
        self.indices.append(index)
        self.elapsed.append((time.perf_counter_ns() - self._start) // 1000)
        logger.debug(f"index {index}: residual {residual:.3e}")

    def build(self, status: Status, message: Optional[str] = None) -> ConvergenceReport:
        order, rate = order_or_none(self.residuals)
        return ConvergenceReport(
            residuals=self.residuals,
            iterate_indices=self.indices,
            elapsed_us=self.elapsed,
            status=status,
            order=self.order,
            applies=self.applies,
            estimated_order=order,
            estimated_rate=rate,
            message=message,
        )


def plain_sequence(op: SemigroupOperator[S], x1: S) -> Iterator[S]:
    """X_1, X_2, ... with X_{k+1} = F(X_k, X_1)."""
    current = x1
    yield current
    while True:
        current = op.apply(current, x1)
        yield current


def accelerated_sequence(op: SemigroupOperator[S], x1: S, r: int) -> Iterator[S]:
    """
    X̂_1, X̂_2, ... of the order-r accelerated iteration, X̂_k = X_{r^{k-1}}.

    Each step rebuilds the ladder X^{(1)} = X̂_k, X^{(ℓ+1)} = F(X̂_k, X^{(ℓ)})
    and sets X̂_{k+1} = F(X̂_k, X^{(r-1)}); r − 1 applications per step.
    """
    if r < 2:
        raise ValueError(f"order r must be at least 2, got {r}")

    hat = x1
    yield hat
    while True:
        ladder = hat
        for _ in range(r - 2):
            ladder = op.apply(hat, ladder)
        hat = op.apply(hat, ladder)
        yield hat


def _drive(
    op: SemigroupOperator[S],
    x1: S,
    cfg: SolverConfig,
    sequence: Iterator[S],
    order: int,
    on_step: Optional[StepCallback],
) -> Tuple[S, ConvergenceReport]:
    applies_per_step = 1 if order == 1 else order - 1
    builder = ReportBuilder(order=order)

    current = next(sequence)
    try:
        residual = op.residual(current)
    except Breakdown as e:
        logger.error(f"{op.name}: breakdown evaluating the initial residual: {e}")
        builder.record(1, float("inf"))
        return current, builder.build(Status.BREAKDOWN, str(e))
    builder.record(1, residual)
    if on_step:
        on_step(1, current)

    if op.converged(None, current, residual, cfg.tol):
        return current, builder.build(Status.CONVERGED)

    for k in range(2, cfg.max_outer + 2):
        try:
            following = next(sequence)
            builder.applies += applies_per_step
            residual = op.residual(following)
        except Breakdown as e:
            logger.error(f"{op.name}: breakdown at outer step {k - 1}: {e}")
            return current, builder.build(Status.BREAKDOWN, str(e))

        previous, current = current, following
        builder.record(k if order == 1 else order ** (k - 1), residual)
        if on_step:
            on_step(k, current)

        if op.converged(previous, current, residual, cfg.tol):
            logger.info(f"{op.name}: converged after {k - 1} steps (residual {residual:.3e})")
            return current, builder.build(Status.CONVERGED)

    logger.warning(f"{op.name}: no convergence within {cfg.max_outer} steps (residual {residual:.3e})")
    return current, builder.build(Status.MAX_ITERATIONS)


def plain_iterate(
    op: SemigroupOperator[S],
    x1: S,
    cfg: SolverConfig,
    on_step: Optional[StepCallback] = None,
) -> Tuple[S, ConvergenceReport]:
    """Run X_{k+1} = F(X_k, X_1) until the residual meets cfg.tol or cfg.max_outer steps."""
    return _drive(op, x1, cfg, plain_sequence(op, x1), 1, on_step)


def accelerated_iterate(
    op: SemigroupOperator[S],
    x1: S,
    cfg: SolverConfig,
    on_step: Optional[StepCallback] = None,
) -> Tuple[S, ConvergenceReport]:
    """Run the order-cfg.order accelerated iteration; row k has iterate index r^{k-1}."""
    return _drive(op, x1, cfg, accelerated_sequence(op, x1, cfg.order), cfg.order, on_step)


def iterate(
    op: SemigroupOperator[S],
    x1: S,
    cfg: SolverConfig,
    on_step: Optional[StepCallback] = None,
) -> Tuple[S, ConvergenceReport]:
    """Dispatch on cfg.mode."""
    if cfg.accelerated:
        return accelerated_iterate(op, x1, cfg, on_step)
    return plain_iterate(op, x1, cfg, on_step)


def doubling(op: SemigroupOperator[S], x1: S, cfg: SolverConfig) -> Tuple[S, ConvergenceReport]:
    """X̂_{k+1} = F(X̂_k, X̂_k)."""
    return accelerated_iterate(op, x1, cfg.model_copy(update={"order": 2}))


def tripling(op: SemigroupOperator[S], x1: S, cfg: SolverConfig) -> Tuple[S, ConvergenceReport]:
    """X̂_{k+1} = F(X̂_k, F(X̂_k, X̂_k))."""
    return accelerated_iterate(op, x1, cfg.model_copy(update={"order": 3}))


def flow_element(op: SemigroupOperator[S], x1: S, n: int) -> S:
    """
    X_n by binary decomposition of n, using X_{i+j} = F(X_i, X_j).

    Args:
        op: Semigroup operator
        x1: Initial state
        n: Target index (≥ 1)

    Returns:
        The state X_n
    """
    if n < 1:
        raise ValueError(f"flow index must be positive, got {n}")

    result: Optional[S] = None
    power = x1  # X_{2^j}
    while n:
        if n & 1:
            result = power if result is None else op.apply(result, power)
        n >>= 1
        if n:
            power = op.apply(power, power)
    return result


def check_associativity(op: SemigroupOperator[S], x: S, y: S, z: S) -> float:
    """Relative gap between F(F(X,Y),Z) and F(X,F(Y,Z)), maximal over components."""
    require_conforming(x, y)
    require_conforming(y, z)
    left = op.apply(op.apply(x, y), z)
    right = op.apply(x, op.apply(y, z))
    return state_distance(left, right)
