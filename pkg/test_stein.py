#!/usr/bin/env python3
"""
Tests for the Stein equation X = AXB + C: operator algebra, plain and
accelerated Smith iterations, the direct r-Smith recursion and the
ρ(A)ρ(B) < 1 gate.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from semiflow.engine.semigroup import check_associativity
from semiflow.errors import DimensionMismatch, PreconditionViolation
from semiflow.models.config import SolverConfig, SolverMode
from semiflow.models.report import Status
from semiflow.models.states import SteinState
from semiflow.services.matrixkit import relative_difference
from semiflow.solvers.stein import (
    SteinOperator,
    check_stein_precondition,
    r_smith_direct,
    stein_operator,
    stein_residual,
    stein_solve,
)
from semiflow.tasks.instances import random_stein, stein_benchmark, stein_series


def test_stein_operator_scalar():
    """(2, 3, 1)∘(5, 7, 4) = (10, 21, 1 + 2·4·3)."""
    result = stein_operator(SteinState(2.0, 3.0, 1.0), SteinState(5.0, 7.0, 4.0))
    assert result.A[0, 0] == 10
    assert result.B[0, 0] == 21
    assert result.C[0, 0] == 25


def test_stein_operator_rectangular_associativity(rng):
    """C may be m×n with m != n."""
    x, y, z = (random_stein(rng, 3, 5) for _ in range(3))
    assert check_associativity(SteinOperator(x), x, y, z) < 1e-12


def test_stein_operator_rejects_nonconforming(rng):
    with pytest.raises(DimensionMismatch):
        stein_operator(random_stein(rng, 3), random_stein(rng, 4))
    with pytest.raises(DimensionMismatch):
        SteinState(np.eye(2), np.eye(3), np.ones((3, 2)))


def test_stein_residual_shape_check(rng):
    problem = random_stein(rng, 3)
    with pytest.raises(DimensionMismatch):
        stein_residual(problem, np.zeros((2, 2)))


def test_accelerated_smith_matches_series(rng, accelerated_cfg):
    """Doubling reaches 1e-12 within 8 outer steps and matches Σ AⁱCBⁱ."""
    problem = stein_benchmark(rng, n=8, rho_product=0.8)
    X, report = stein_solve(problem.A, problem.B, problem.C, accelerated_cfg)

    assert report.status == Status.CONVERGED
    assert report.outer_steps <= 8
    assert report.final_residual <= 1e-12
    assert relative_difference(stein_series(problem, 400), X) < 1e-9


def test_plain_smith_is_linear_and_slow(rng, plain_cfg, accelerated_cfg):
    """Plain Smith converges at rate ≈ 0.8 and needs ≥ 15× the doubling steps."""
    problem = stein_benchmark(rng, n=8, rho_product=0.8)
    _, plain = stein_solve(problem.A, problem.B, problem.C, plain_cfg)
    _, accelerated = stein_solve(problem.A, problem.B, problem.C, accelerated_cfg)

    assert plain.status == Status.CONVERGED
    assert 110 <= plain.outer_steps <= 140
    assert plain.estimated_order == pytest.approx(1.0, abs=0.1)
    assert plain.estimated_rate <= 0.85
    assert plain.outer_steps >= 15 * accelerated.outer_steps
    assert accelerated.applies < plain.outer_steps


@pytest.mark.parametrize("r", [2, 3, 4])
def test_r_smith_direct_matches_engine(rng, r):
    problem = stein_benchmark(rng, n=6, rho_product=0.8)
    cfg = SolverConfig(order=r, tol=1e-12, max_outer=30, mode=SolverMode.ACCELERATED)

    direct, direct_report = r_smith_direct(problem, r, cfg)
    engine, engine_report = stein_solve(problem.A, problem.B, problem.C, cfg)

    assert direct_report.status == Status.CONVERGED
    assert direct_report.iterate_indices == engine_report.iterate_indices
    assert direct_report.applies == engine_report.applies
    assert relative_difference(engine, direct) < 1e-11


def test_outer_steps_do_not_grow_with_order(rng):
    problem = stein_benchmark(rng, n=8, rho_product=0.8)
    steps = []
    for r in (2, 3, 4):
        cfg = SolverConfig(order=r, tol=1e-12, max_outer=60)
        _, report = stein_solve(problem.A, problem.B, problem.C, cfg)
        steps.append(report.outer_steps)
    assert steps == sorted(steps, reverse=True)


def test_precondition_gate():
    """ρ(A)ρ(B) = 1.1 is refused unless forced; forced runs hit the iteration cap."""
    A, B, C = [[1.1]], [[1.0]], [[1.0]]
    with pytest.raises(PreconditionViolation, match="rho"):
        stein_solve(A, B, C, SolverConfig(tol=1e-12, max_outer=5))

    _, report = stein_solve(A, B, C, SolverConfig(tol=1e-12, max_outer=5), force=True)
    assert report.status == Status.MAX_ITERATIONS
    assert check_stein_precondition(SteinState(A, B, C), force=True) == pytest.approx(1.1)


def test_rectangular_solution_satisfies_equation(rng, accelerated_cfg):
    problem = random_stein(rng, 4, 7, rho_product=0.5)
    X, report = stein_solve(problem.A, problem.B, problem.C, accelerated_cfg)

    assert X.shape == (4, 7)
    assert report.status == Status.CONVERGED
    assert_allclose(X, problem.A @ X @ problem.B + problem.C, atol=1e-10)
