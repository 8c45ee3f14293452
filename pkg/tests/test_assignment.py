"""Balanced linear assignment."""
from __future__ import annotations

import numpy as np
import pytest

from mdpdist.assignment import CostMatrix, hungarian

from oracles import brute_assignment


def test_identity_1x1():
    sigma, total = hungarian(np.array([[0.0]]))
    assert sigma == (0,)
    assert total == 0.0


def test_swap_2x2():
    sigma, total = hungarian(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert sigma == (1, 0)
    assert total == 0.0


def test_derived_2x2():
    # enumerating both permutations: 4 + 3 = 7 against 1 + 2 = 3
    sigma, total = hungarian(np.array([[4.0, 1.0], [2.0, 3.0]]))
    assert sigma == (1, 0)
    assert total == 3.0


def test_empty_matrix():
    sigma, total = hungarian(np.zeros((0, 0)))
    assert sigma == ()
    assert total == 0.0


def test_validation_errors():
    with pytest.raises(ValueError):
        hungarian(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        hungarian(np.array([[-1.0]]))
    with pytest.raises(ValueError):
        hungarian(np.array([[np.inf]]))
    with pytest.raises(ValueError):
        hungarian(np.array([[np.nan]]))


def test_cost_matrix_labels():
    cm = CostMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]), ["a", "b"], ["x", "y"])
    assert cm.k == 2
    with pytest.raises(ValueError):
        CostMatrix(np.zeros((2, 2)), ["a"], ["x", "y"])


def test_matches_brute_enumeration():
    rng = np.random.default_rng(61)
    for _ in range(120):
        k = int(rng.integers(0, 7))
        costs = np.round(rng.random((k, k)) * 10, 3)
        sigma, total = hungarian(costs)
        bsigma, btotal = brute_assignment(costs)
        assert total == pytest.approx(btotal, rel=0, abs=1e-12)
        assert sigma == bsigma  # lexicographically smallest optimum


def test_ties_pick_lex_smallest():
    # every assignment costs 2; identity is the lex-smallest permutation
    sigma, total = hungarian(np.ones((3, 3)))
    assert sigma == (0, 1, 2)
    assert total == 3.0


def test_total_invariant_under_joint_permutation():
    rng = np.random.default_rng(62)
    for _ in range(30):
        k = int(rng.integers(1, 7))
        costs = rng.random((k, k))
        _, total = hungarian(costs)
        rp = rng.permutation(k)
        cp = rng.permutation(k)
        _, total2 = hungarian(costs[np.ix_(rp, cp)])
        assert total2 == pytest.approx(total, rel=0, abs=1e-12)
