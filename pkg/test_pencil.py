#!/usr/bin/env python3
"""
Tests for the pencil iteration and stable deflating subspace extraction.
The conjugated-diagonal pencils have a known stable subspace, so the computed
basis is checked through principal angles.
"""
from itertools import islice

import numpy as np
import pytest
from numpy.testing import assert_allclose

from semiflow.engine.semigroup import check_associativity, plain_sequence
from semiflow.errors import DimensionMismatch, RankAmbiguity
from semiflow.models.report import Status
from semiflow.models.states import PencilState, state_distance
from semiflow.services.matrixkit import fro_norm
from semiflow.solvers.pencil import (
    PencilOperator,
    pencil_operator,
    pencil_operator_alt,
    principal_angles,
    stable_subspace_solve,
)
from semiflow.tasks.instances import conjugated_pencil, random_pencil_state

EIGENVALUES = [0.3, 0.6, 1.5, 2.0]


def test_pencil_operator_scalar():
    """(1, 2)∘(3, 4): Δ = 1/5, A = 3/5, B = 8/5."""
    result = pencil_operator(PencilState(1.0, 2.0), PencilState(3.0, 4.0))
    assert result.A[0, 0] == pytest.approx(0.6)
    assert result.B[0, 0] == pytest.approx(1.6)


def test_alternate_form_agrees(rng):
    x, y = random_pencil_state(rng, 5), random_pencil_state(rng, 5)
    assert state_distance(pencil_operator(x, y), pencil_operator_alt(x, y)) < 1e-12


def test_pencil_operator_is_associative(rng):
    x, y, z = (random_pencil_state(rng, 8) for _ in range(3))
    assert check_associativity(PencilOperator(x, 1), x, y, z) < 1e-10


def test_stable_subspace_recovered(rng, accelerated_cfg):
    """Eigenvalues {0.3, 0.6, 1.5, 2.0}, m = 2: U spans the known stable subspace."""
    instance = conjugated_pencil(rng, EIGENVALUES)
    result = stable_subspace_solve(instance.state, instance.m, accelerated_cfg)

    assert result.status == Status.CONVERGED
    assert result.iterations <= 10
    assert max(principal_angles(result.U, instance.stable_basis)) <= 1e-8
    assert result.residual <= 1e-10
    assert not result.b_growth_flag
    assert_allclose(np.sort(np.linalg.eigvals(result.Lambda).real), [0.3, 0.6], atol=1e-8)


def test_invariance_carries_to_iterates(rng, accelerated_cfg):
    """A_k U = B_k U Λ^k along the plain iteration."""
    instance = conjugated_pencil(rng, EIGENVALUES)
    result = stable_subspace_solve(instance.state, instance.m, accelerated_cfg)
    op = PencilOperator(instance.state, instance.m)

    for k, state in enumerate(islice(plain_sequence(op, instance.state), 6), start=1):
        gap = state.A @ result.U - state.B @ result.U @ np.linalg.matrix_power(result.Lambda, k)
        assert fro_norm(gap) <= 1e-9 * fro_norm(state.A)


def test_plain_and_accelerated_agree(rng, plain_cfg, accelerated_cfg):
    instance = conjugated_pencil(rng, EIGENVALUES)
    plain = stable_subspace_solve(instance.state, instance.m, plain_cfg)
    accelerated = stable_subspace_solve(instance.state, instance.m, accelerated_cfg)

    assert plain.status == Status.CONVERGED
    assert plain.iterations > 4 * accelerated.iterations
    assert max(principal_angles(plain.U, accelerated.U)) <= 1e-8


def test_full_stable_pencil(rng, accelerated_cfg):
    """m = n: A_k → 0 and the whole space is stable."""
    instance = conjugated_pencil(rng, [0.3, 0.6, 0.5, 0.4])
    result = stable_subspace_solve(instance.state, 4, accelerated_cfg)

    assert result.status == Status.CONVERGED
    assert result.residual <= 1e-10
    assert_allclose(np.sort(np.linalg.eigvals(result.Lambda).real), [0.3, 0.4, 0.5, 0.6], atol=1e-8)


def test_wrong_dimension_is_rank_ambiguous(rng, accelerated_cfg):
    """Asking for 3 stable directions when only 2 exist leaves no singular value gap."""
    instance = conjugated_pencil(rng, EIGENVALUES)
    with pytest.raises(RankAmbiguity):
        stable_subspace_solve(instance.state, 3, accelerated_cfg)


def test_breakdown_is_reported(accelerated_cfg):
    """A + B = 0 makes the first Δ singular."""
    result = stable_subspace_solve(PencilState(1.0, -1.0), 1, accelerated_cfg)
    assert result.status == Status.BREAKDOWN
    assert result.iterations == 0


def test_subspace_dimension_bounds(rng):
    state = random_pencil_state(rng, 3)
    with pytest.raises(DimensionMismatch):
        PencilOperator(state, 0)
    with pytest.raises(DimensionMismatch):
        PencilOperator(state, 4)


def test_principal_angles():
    assert principal_angles(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx([np.pi / 2])
    assert principal_angles(np.eye(3)[:, :2], np.eye(3)[:, [1, 0]]) == pytest.approx([0.0, 0.0], abs=1e-12)
    with pytest.raises(DimensionMismatch):
        principal_angles(np.eye(3), np.eye(2))
