#!/usr/bin/env python3
"""
Tests for the property check suites behind `semiflow check`.
"""
import math

import numpy as np
import pytest

from semiflow.tasks.checks import SUITES, SuiteResult, run_suites


def test_suite_result_records_failures():
    """Errors above tolerance and non-finite errors both fail the suite."""
    result = SuiteResult(name="demo", tolerance=1e-10)
    result.record("small", 1e-12)
    assert result.passed
    assert result.max_error == 1e-12

    result.record("nan", math.nan)
    assert not result.passed
    assert len(result.failures) == 1

    other = SuiteResult(name="demo", tolerance=1e-10)
    other.record("large", 1e-3)
    assert not other.passed


def test_suite_result_custom_bound():
    """A case-specific bound replaces the suite tolerance."""
    result = SuiteResult(name="demo", tolerance=1e-10)
    result.record("loose", 1e-9, bound=1e-8)
    assert result.passed
    result.record("too loose", 1e-7, bound=1e-8)
    assert not result.passed


@pytest.mark.parametrize("name", list(SUITES))
def test_each_suite_passes_on_a_short_run(name):
    """Every suite passes with a handful of trials."""
    (result,) = run_suites([name], seed=11, trials=10)
    assert result.name == name
    assert result.passed, result.failures
    assert result.cases


def test_all_expands_to_every_suite():
    """'all' runs the suites in registry order."""
    results = run_suites(["all"], seed=3, trials=5)
    assert [r.name for r in results] == list(SUITES)


def test_same_seed_same_errors():
    """Suites are reproducible from the seed."""
    first = run_suites(["associativity"], seed=5, trials=5)[0]
    second = run_suites(["associativity"], seed=5, trials=5)[0]
    assert first.max_error == second.max_error
    assert np.isfinite(first.max_error)


def test_unknown_suite_raises():
    """Unknown suite names are a ValueError."""
    with pytest.raises(ValueError):
        run_suites(["nonsense"], seed=1, trials=1)
