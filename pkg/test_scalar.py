#!/usr/bin/env python3
"""
Tests for the scalar problems: direct recursions, closed forms, limits and
the 1x1 matrix path through the generic engine.
"""
from itertools import islice

import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, integers

from semiflow.engine.semigroup import accelerated_sequence, iterate
from semiflow.errors import Breakdown, DegenerateCoefficient, PreconditionViolation
from semiflow.models.report import Status
from semiflow.solvers.scalar import (
    LinearScalarProblem,
    PairOperator,
    PairProblem,
    RationalScalarOperator,
    RationalScalarProblem,
    linear_accel_step,
    linear_accelerated_sequence,
    linear_exact_error,
    linear_plain_sequence,
    linear_q_constant,
    pair_G,
    pair_H,
    pair_closed_form,
    pair_limit,
    rational_closed_form,
    rational_g,
    rational_h,
    rational_limit,
    scalar_of,
)

LINEAR = LinearScalarProblem(a=0.5, b=1.0, x1=0.0)


# Linear x = ax + b

def test_linear_accelerated_sequence():
    """Doubling gives 0, 1, 1.75, 1.984375 and tripling 0, 1.5, 1.9921875."""
    assert linear_accelerated_sequence(LINEAR, 2, 4) == pytest.approx([0.0, 1.0, 1.75, 1.984375], abs=1e-13)
    assert linear_accelerated_sequence(LINEAR, 3, 3) == pytest.approx([0.0, 1.5, 1.9921875], abs=1e-13)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_linear_accelerated_matches_plain_index(r):
    plain = linear_plain_sequence(LINEAR, r ** 3)
    accelerated = linear_accelerated_sequence(LINEAR, r, 4)
    for k in range(4):
        assert accelerated[k] == pytest.approx(plain[r ** k - 1], abs=1e-13)


def test_linear_accel_step():
    assert linear_accel_step(0.5, 1.0, 2) == pytest.approx((0.25, 1.5))
    with pytest.raises(DegenerateCoefficient):
        linear_accel_step(1.0, 1.0, 2)
    with pytest.raises(ValueError):
        linear_accel_step(0.5, 1.0, 1)


def test_linear_exact_error_and_q_constant():
    """|x̂_k − 2| = 0.5^(2^(k−1) − 1)·2 and the error ratio stays at 0.25."""
    values = linear_accelerated_sequence(LINEAR, 2, 6)
    for k, value in enumerate(values, start=1):
        assert abs(value - 2.0) == pytest.approx(linear_exact_error(LINEAR, 2, k))

    q = linear_q_constant(LINEAR, 2)
    assert q == pytest.approx(0.25)
    for previous, following in zip(values, values[1:]):
        assert abs(following - 2.0) / abs(previous - 2.0) ** 2 == pytest.approx(q, rel=1e-6)


def test_linear_fixed_point_degenerate():
    assert LINEAR.fixed_point == 2.0
    with pytest.raises(DegenerateCoefficient):
        LinearScalarProblem(a=1.0, b=1.0).fixed_point


# Rational x = bx/(b + x − a)

def test_rational_h_and_closed_form():
    """a = 2 from y1 = 3: 3, 2.25, 2.025."""
    assert rational_h(3.0, 2.0, 2) == pytest.approx(2.25)
    assert rational_h(2.25, 2.0, 2) == pytest.approx(2.025)
    for k, expected in enumerate([3.0, 2.25, 2.025], start=1):
        assert rational_closed_form(3.0, 2.0, 2, k) == pytest.approx(expected, abs=1e-12)


def test_rational_special_cases():
    assert rational_h(3.0, 0.0, 3) == pytest.approx(1.0)
    assert rational_closed_form(3.0, 0.0, 2, 3) == pytest.approx(0.75)
    with pytest.raises(Breakdown):
        rational_h(1.0, 2.0, 2)
    with pytest.raises(Breakdown):
        rational_g(1.0, 1.0, 2.0)


def test_rational_limit_classification():
    assert rational_limit(3.0, 2.0) == 2.0
    assert rational_limit(1.0, 3.0) == 0.0
    assert rational_limit(1.0, 2.0) is None


def test_rational_problem_preconditions():
    with pytest.raises(PreconditionViolation):
        RationalScalarProblem(a=2.0, b=2.0)
    with pytest.raises(PreconditionViolation):
        RationalScalarProblem(a=2.0, b=0.0)


@settings(max_examples=100, deadline=None)
@given(
    floats(min_value=0.5, max_value=3.0),
    floats(min_value=-3.0, max_value=-0.5),
    integers(min_value=2, max_value=5),
)
def test_rational_h_equals_composed_g(x, a, r):
    """h_r(x) is g(·, x) applied r − 1 times; negative a keeps every denominator positive."""
    y = x
    for _ in range(r - 1):
        y = rational_g(y, x, a)
    assert rational_h(x, a, r) == pytest.approx(y, rel=1e-12)


# Pair [x, y]

def test_pair_sequence():
    """(1, 2) doubles to (1/3, 4/3) and then (1/15, 16/15)."""
    first = pair_H(1.0, 2.0, 2)
    assert first == pytest.approx((1 / 3, 4 / 3), abs=1e-13)
    assert pair_H(*first, 2) == pytest.approx((1 / 15, 16 / 15), abs=1e-13)
    assert pair_closed_form(1.0, 2.0, 2, 3) == pytest.approx((1 / 15, 16 / 15), abs=1e-13)
    assert pair_G((1.0, 2.0), (1.0, 2.0)) == pytest.approx(first)


def test_pair_limits_and_preconditions():
    assert pair_limit(1.0, 2.0) == (0j, 1.0)
    assert pair_limit(2.0, 1.0) == (1.0, 0j)
    assert pair_limit(1.0, 1.0) == (0j, 0j)
    assert pair_closed_form(2.0, 2.0, 2, 3) == pytest.approx((0.5, 0.5))
    with pytest.raises(PreconditionViolation):
        PairProblem(x1=0.0, y1=1.0)


def test_pair_closed_form_far_out_reaches_the_limit():
    """Powers like 2^2048 are never formed; large k lands on the limit point."""
    assert pair_closed_form(1.0, 2.0, 2, 12) == pair_limit(1.0, 2.0)
    assert pair_closed_form(3.0, 1.5, 2, 12) == pair_limit(3.0, 1.5)
    assert pair_closed_form(1.0, 2.0, 2, 2000) == pair_limit(1.0, 2.0)
    with pytest.raises(Breakdown):
        pair_closed_form(1.0, -1.0, 2, 2000)


@settings(max_examples=100, deadline=None)
@given(
    floats(min_value=0.2, max_value=3.0),
    floats(min_value=0.2, max_value=3.0),
    integers(min_value=2, max_value=5),
)
def test_pair_H_equals_composed_G(x, y, r):
    z = (x, y)
    ladder = z
    for _ in range(r - 1):
        ladder = pair_G(z, ladder)
    assert pair_H(x, y, r) == pytest.approx(ladder, rel=1e-12)


# Matrix path

def test_rational_engine_matches_closed_form():
    op = RationalScalarOperator(RationalScalarProblem(a=2.0, b=3.0))
    values = [scalar_of(state.y) for state in islice(accelerated_sequence(op, op.initial_state(), 2), 3)]
    assert values == pytest.approx([3.0, 2.25, 2.025], abs=1e-13)


def test_pair_engine_matches_closed_form():
    op = PairOperator(PairProblem(x1=1.0, y1=2.0))
    states = list(islice(accelerated_sequence(op, op.initial_state(), 2), 3))
    assert (scalar_of(states[1].x), scalar_of(states[1].y)) == pytest.approx((1 / 3, 4 / 3), abs=1e-13)
    assert (scalar_of(states[2].x), scalar_of(states[2].y)) == pytest.approx((1 / 15, 16 / 15), abs=1e-13)
    assert op.solution_view(states[2]).shape == (1, 2)


def test_rational_iteration_converges_to_a(accelerated_cfg):
    op = RationalScalarOperator(RationalScalarProblem(a=2.0, b=3.0))
    final, report = iterate(op, op.initial_state(), accelerated_cfg)

    assert report.status == Status.CONVERGED
    assert scalar_of(final.y) == pytest.approx(2.0, abs=1e-10)
