"""Shared fixtures."""

import numpy as np
import pytest

from locc_ladder import validate


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def n4_pair():
    source = validate([0.4, 0.3, 0.2, 0.1], squared=True)
    target = validate([0.55, 0.25, 0.15, 0.05], squared=True)
    return source, target


@pytest.fixture
def case1_pair():
    return (
        validate([0.5, 0.3, 0.2], squared=True),
        validate([0.7, 0.2, 0.1], squared=True),
    )


@pytest.fixture
def case2_pair():
    return (
        validate([0.4, 0.35, 0.25], squared=True),
        validate([0.5, 0.4, 0.1], squared=True),
    )


@pytest.fixture
def infeasible_ladder_pair():
    # Majorization holds, yet the forced intermediate multiset
    # {0.35, 0.3, 0.25, 0.1} is not majorized by the target.
    return (
        validate([0.25, 0.25, 0.25, 0.25], squared=True),
        validate([0.3, 0.3, 0.3, 0.1], squared=True),
    )
