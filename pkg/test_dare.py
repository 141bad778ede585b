#!/usr/bin/env python3
"""
Tests for the discrete-time algebraic Riccati equation X = H + AᴴX(I + GX)⁻¹A.
Random instances are cross-checked against scipy's DARE solver.
"""
import logging
from itertools import islice

import numpy as np
import pytest
import scipy.linalg as la
from numpy.testing import assert_allclose

from semiflow.engine.semigroup import accelerated_sequence, check_associativity, flow_element, plain_sequence
from semiflow.errors import PreconditionViolation
from semiflow.models.report import Status
from semiflow.models.states import DareState, state_distance
from semiflow.services.matrixkit import hermitian_eigenvalues, relative_difference
from semiflow.solvers.dare import DareOperator, dare_lemma_suite, dare_operator, dare_residual, dare_solve
from semiflow.tasks.instances import random_dare_state

GOLDEN = (1 + np.sqrt(5)) / 2
SCALAR = DareState(A=1.0, G=1.0, H=1.0)


def test_scalar_plain_sequence():
    """H-components 1, 1.5, 1.6, 21/13 and X_4 = (1/13, 21/13, 21/13)."""
    op = DareOperator(SCALAR)
    states = list(islice(plain_sequence(op, SCALAR), 4))
    assert [s.H[0, 0].real for s in states] == pytest.approx([1.0, 1.5, 1.6, 21 / 13])

    fourth = states[3]
    assert [fourth.A[0, 0], fourth.G[0, 0], fourth.H[0, 0]] == pytest.approx([1 / 13, 21 / 13, 21 / 13])
    assert state_distance(fourth, flow_element(op, SCALAR, 4)) < 1e-14
    assert state_distance(fourth, list(islice(accelerated_sequence(op, SCALAR, 2), 3))[2]) < 1e-14


def test_golden_scalar(accelerated_cfg):
    X, report = dare_solve(1.0, 1.0, 1.0, accelerated_cfg)

    assert report.status == Status.CONVERGED
    assert X[0, 0] == pytest.approx(GOLDEN, abs=1e-12)


def test_correct_digits_double(accelerated_cfg):
    """Once the residual is below 1e-2 every doubling step multiplies the correct digits by ≥ 1.7."""
    _, report = dare_solve(1.0, 1.0, 1.0, accelerated_cfg)
    digits = [-np.log10(e) for e in report.residuals if 1e-14 < e < 1e-2]

    assert len(digits) >= 2
    for previous, following in zip(digits, digits[1:]):
        assert following >= 1.7 * previous


@pytest.mark.parametrize("complex_entries", [False, True])
def test_random_instance_matches_scipy(rng, accelerated_cfg, complex_entries):
    problem = random_dare_state(rng, 10, complex_entries=complex_entries)
    X, report = dare_solve(problem.A, problem.G, problem.H, accelerated_cfg)

    assert report.status == Status.CONVERGED
    assert report.outer_steps <= 10
    assert dare_residual(problem, X) <= 1e-10
    assert_allclose(X, X.conj().T, atol=1e-12)

    # G = BBᴴ with R = I turns the problem into scipy's form
    B = la.cholesky(problem.G, lower=True)
    reference = la.solve_discrete_are(problem.A, B, problem.H, np.eye(10))
    assert_allclose(X, reference, rtol=1e-8, atol=1e-8)


def test_dare_operator_is_associative(rng):
    x, y, z = (random_dare_state(rng, 8, complex_entries=True) for _ in range(3))
    assert check_associativity(DareOperator(x), x, y, z) < 1e-10


def test_symmetrized_composition_is_hermitian(rng):
    x, y = random_dare_state(rng, 6, complex_entries=True), random_dare_state(rng, 6, complex_entries=True)
    result = dare_operator(x, y)
    assert np.array_equal(result.G, result.G.conj().T)
    assert np.array_equal(result.H, result.H.conj().T)


def test_plain_iterates_increase_in_loewner_order(rng):
    """With G, H positive definite the H-components form a nondecreasing Hermitian sequence."""
    base = random_dare_state(rng, 6, complex_entries=True)
    problem = DareState(A=base.A, G=base.G + 0.1 * np.eye(6), H=base.H + 0.1 * np.eye(6))
    states = list(islice(plain_sequence(DareOperator(problem), problem), 30))

    for previous, current in zip(states, states[1:]):
        step = current.H - previous.H
        assert hermitian_eigenvalues(step)[0] >= -1e-10 * max(1.0, np.linalg.norm(current.H))


def test_unsymmetrized_doubling_stays_hermitian(rng):
    """Ten doubling steps without symmetrization drift from Hermitian only by rounding."""
    x = random_dare_state(rng, 6, complex_entries=True)
    for _ in range(10):
        x = dare_operator(x, x, symmetrize=False)
        assert relative_difference(x.G, x.G.conj().T) <= 1e-11
        assert relative_difference(x.H, x.H.conj().T) <= 1e-11


def test_lemma_identities(rng):
    for _ in range(20):
        triple = [random_dare_state(rng, 6, complex_entries=True) for _ in range(3)]
        assert dare_lemma_suite(*triple).worst <= 1e-10


def test_non_hermitian_input_rejected(accelerated_cfg):
    with pytest.raises(PreconditionViolation, match="G"):
        dare_solve(np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2), accelerated_cfg)


def test_indefinite_input_warns_and_breaks_down(accelerated_cfg, caplog):
    """I + GH is singular for G = diag(1, −1), H = I."""
    with caplog.at_level(logging.WARNING):
        _, report = dare_solve(0.5 * np.eye(2), np.diag([1.0, -1.0]), np.eye(2), accelerated_cfg)

    assert "indefinite" in caplog.text
    assert report.status == Status.BREAKDOWN
