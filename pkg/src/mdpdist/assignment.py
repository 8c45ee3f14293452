"""Balanced linear assignment.

Thin, validated wrapper over scipy's Jonker-Volgenant solver with a
deterministic contract: among all optimal assignments, ``hungarian``
returns the lexicographically smallest permutation.  The private
``_solve_lap`` skips validation and tie-breaking; the distance code
calls it in bulk on matrices that are mostly 2x2 and 3x3, where direct
enumeration beats the scipy call overhead.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass
class CostMatrix:
    costs: np.ndarray
    row_labels: tuple | None = None
    col_labels: tuple | None = None

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        if self.costs.ndim != 2 or self.costs.shape[0] != self.costs.shape[1]:
            raise ValueError(f"cost matrix must be square, got shape {self.costs.shape}")
        _validate(self.costs)
        for labels, count in ((self.row_labels, self.costs.shape[0]),
                              (self.col_labels, self.costs.shape[1])):
            if labels is not None and len(labels) != count:
                raise ValueError("label count does not match matrix size")

    @property
    def k(self) -> int:
        return self.costs.shape[0]


def _validate(costs: np.ndarray) -> None:
    if costs.size and not np.isfinite(costs).all():
        raise ValueError("cost matrix has non-finite entries")
    if costs.size and (costs < 0).any():
        raise ValueError("cost matrix has negative entries")


def _solve_lap(costs: np.ndarray) -> tuple[list[int], float]:
    """Minimal assignment, arbitrary optimal permutation, no validation."""
    k = costs.shape[0]
    if k == 0:
        return [], 0.0
    if k == 1:
        return [0], float(costs[0, 0])
    if k == 2:
        keep = costs[0, 0] + costs[1, 1]
        swap = costs[0, 1] + costs[1, 0]
        return ([0, 1], float(keep)) if keep <= swap else ([1, 0], float(swap))
    if k == 3:
        best, total = None, math.inf
        for perm in itertools.permutations(range(3)):
            t = costs[0, perm[0]] + costs[1, perm[1]] + costs[2, perm[2]]
            if t < total:
                best, total = perm, t
        return list(best), float(total)
    rows, cols = linear_sum_assignment(costs)
    return list(map(int, cols)), float(costs[rows, cols].sum())


def hungarian(costs: np.ndarray | CostMatrix) -> tuple[tuple[int, ...], float]:
    """Minimal assignment with deterministic tie-breaking.

    Returns (sigma, total) where sigma[i] is the column assigned to row i
    and sigma is the lexicographically smallest permutation attaining the
    optimum.  Raises ValueError on non-square matrices and negative or
    non-finite entries.
    """
    mat = costs.costs if isinstance(costs, CostMatrix) else np.asarray(costs, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {mat.shape}")
    _validate(mat)
    k = mat.shape[0]
    _, target = _solve_lap(mat)
    # fix columns row by row: the smallest column whose choice still admits
    # an optimal completion is the lex-smallest optimal prefix
    sigma: list[int] = []
    avail = list(range(k))
    prefix = 0.0
    for i in range(k):
        for idx, j in enumerate(avail):
            rest_rows = list(range(i + 1, k))
            rest_cols = avail[:idx] + avail[idx + 1:]
            _, rest = _solve_lap(mat[np.ix_(rest_rows, rest_cols)])
            cand = prefix + mat[i, j] + rest
            if math.isclose(cand, target, rel_tol=1e-12, abs_tol=1e-12):
                sigma.append(j)
                avail.pop(idx)
                prefix += mat[i, j]
                break
        else:  # pragma: no cover - some column always admits an optimal completion
            raise AssertionError("no optimal completion found")
    total = float(sum(mat[i, sigma[i]] for i in range(k)))
    return tuple(sigma), total
