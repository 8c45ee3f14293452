"""Wasserstein-style distances between persistence diagrams and MDPDs.

``mdrg_distance`` matches MDPD points under three constraints: points
may only meet when their first-field nodes sit at the same quantized
level (recursed through every descent level for more than two fields),
all points of one node's subset travel together to a single node on the
other side, and only points whose per-factor homology dimensions agree
may be paired.  Whatever cannot be matched pays its distance to the
diagonal, half the largest factor persistence per point.  Each per-level
node matching is a balanced assignment problem; costs between matched
nodes come from the one-level-deeper matching, bottoming out in the
per-dimension-class point matching of ``inner_distance``.

Arguments are put in a canonical order before computing, so the result
is exactly symmetric and self-distance is exactly zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .assignment import _solve_lap
from .mdpd import MDPD, MDPDPoint, persistence_interval
from .persistence import PersistenceDiagram, PersistencePoint


class DistanceError(ValueError):
    pass


@dataclass(frozen=True)
class DiagonalSet:
    """Midpoint projections of a point subset; every factor lands on birth = death."""

    points: tuple[tuple[tuple[float, float], ...], ...]

    @classmethod
    def of(cls, pdp: list[MDPDPoint]) -> "DiagonalSet":
        proj = []
        for pt in pdp:
            mids = tuple(((x.birth + x.death) / 2.0,) * 2 for x in pt.factors)
            proj.append(mids)
        return cls(tuple(proj))


@dataclass
class DistanceResult:
    value: float
    q: float
    transcript: list[dict] | None = None


def _coords(pt: MDPDPoint) -> np.ndarray:
    return np.array([c for x in pt.factors for c in (x.birth, x.death)])


def _diag_gap(pt: MDPDPoint) -> float:
    """Chebyshev distance from a composite point to its diagonal projection."""
    return max((hi - lo) for lo, hi in map(persistence_interval, pt.factors)) / 2.0


def diagonal_cost(pdp: list[MDPDPoint], q: float) -> float:
    """Cost of sending every point of the subset to the diagonal."""
    return float(sum(_diag_gap(pt) ** q for pt in pdp))


_REDUCED_MIN = 128  # combined class size beyond which the reduced LAP runs


def _class_cost(a_pts: list[MDPDPoint], b_pts: list[MDPDPoint], q: float) -> float:
    """Matching cost within one dimension class, diagonals included."""
    na, nb = len(a_pts), len(b_pts)
    if na == 0:
        return diagonal_cost(b_pts, q)
    if nb == 0:
        return diagonal_cost(a_pts, q)
    ac = np.stack([_coords(p) for p in a_pts])
    bc = np.stack([_coords(p) for p in b_pts])
    cross = np.abs(ac[:, None, :] - bc[None, :, :]).max(axis=2) ** q
    a_diag = np.array([_diag_gap(p) ** q for p in a_pts])
    b_diag = np.array([_diag_gap(p) ** q for p in b_pts])
    if na + nb <= _REDUCED_MIN:
        size = na + nb
        costs = np.zeros((size, size))
        costs[:na, :nb] = cross
        costs[:na, nb:] = a_diag[:, None]
        costs[na:, :nb] = b_diag[None, :]
        _, total = _solve_lap(costs)
        return total
    # any matching pays every diagonal plus, per matched pair, the
    # reduction cross - diag_a - diag_b; a pair with positive reduction
    # never beats two diagonals, so clamping at zero lets the complete
    # rectangular assignment solve the partial-matching problem
    reduced = np.minimum(cross - a_diag[:, None] - b_diag[None, :], 0.0)
    rows, cols = linear_sum_assignment(reduced)
    total = float(a_diag.sum() + b_diag.sum() + reduced[rows, cols].sum())
    return max(total, 0.0)


def inner_distance(pdp_f: list[MDPDPoint], pdp_g: list[MDPDPoint], q: float) -> float:
    """Point-level matching cost between two node subsets (not q-th-rooted).

    Points are partitioned by their per-factor dimension tuples; matches
    never cross classes.  Both subsets must sit at the same quantized
    levels along their whole descent; an empty subset is exempt, its
    opposite side simply pays the diagonal.
    """
    for pdp in (pdp_f, pdp_g):
        if len({pt.level_path for pt in pdp}) > 1:
            raise DistanceError("subset mixes points from different levels")
    if pdp_f and pdp_g and pdp_f[0].level_path != pdp_g[0].level_path:
        raise DistanceError(
            f"level mismatch: {pdp_f[0].level_path} vs {pdp_g[0].level_path}")
    classes = sorted({pt.dims for pt in pdp_f} | {pt.dims for pt in pdp_g})
    total = 0.0
    for dims in classes:
        total += _class_cost([p for p in pdp_f if p.dims == dims],
                             [p for p in pdp_g if p.dims == dims], q)
    return total


def _canonical_key(mdpd: MDPD):
    return sorted((pt.level_path, pt.node_path, pt.dims,
                   tuple(c for x in pt.factors for c in (x.birth, x.death)),
                   tuple(x.kind for x in pt.factors))
                  for pt in mdpd.points)


def _pair_cost(fpts: list[MDPDPoint], gpts: list[MDPDPoint],
               depth: int, last: int, q: float) -> float:
    if depth == last:
        return inner_distance(fpts, gpts, q)
    return _match_group(fpts, gpts, depth + 1, last, q, None, (), False)


def _match_group(fpts: list[MDPDPoint], gpts: list[MDPDPoint],
                 depth: int, last: int, q: float,
                 sink: list[dict] | None, levels_prefix: tuple[int, ...],
                 swapped: bool) -> float:
    """Per-level node assignment at one descent depth; returns summed cost."""
    by_level_f: dict[int, dict[int, list[MDPDPoint]]] = {}
    by_level_g: dict[int, dict[int, list[MDPDPoint]]] = {}
    for pts, acc in ((fpts, by_level_f), (gpts, by_level_g)):
        for pt in pts:
            acc.setdefault(pt.level_path[depth], {}) \
               .setdefault(pt.node_path[depth], []).append(pt)
    total = 0.0
    for level in sorted(set(by_level_f) | set(by_level_g)):
        fnodes = sorted(by_level_f.get(level, {}))
        gnodes = sorted(by_level_g.get(level, {}))
        fsub = [by_level_f[level][p] for p in fnodes] if fnodes else []
        gsub = [by_level_g[level][p] for p in gnodes] if gnodes else []
        na, nb = len(fnodes), len(gnodes)
        size = na + nb
        costs = np.zeros((size, size))
        for i in range(na):
            for j in range(nb):
                costs[i, j] = _pair_cost(fsub[i], gsub[j], depth, last, q)
        for i in range(na):
            costs[i, nb:] = diagonal_cost(fsub[i], q)
        for j in range(nb):
            costs[na:, j] = diagonal_cost(gsub[j], q)
        sigma, cost = _solve_lap(costs)
        total += cost
        if sink is not None:
            here = levels_prefix + (level,)
            for i, j in enumerate(sigma):
                pf = fnodes[i] if i < na else None
                pg = gnodes[j] if j < nb else None
                if pf is None and pg is None:
                    continue
                pair = (pg, pf) if swapped else (pf, pg)
                sink.append({"levels": list(here), "pair": list(pair),
                             "cost": float(costs[i, j])})
                if pf is not None and pg is not None and depth < last:
                    _match_group(fsub[i], gsub[j], depth + 1, last, q,
                                 sink, here, swapped)
    return total


def mdrg_distance(mdpd_f: MDPD, mdpd_g: MDPD, q: float = 2.0,
                  with_transcript: bool = False) -> DistanceResult:
    """Constrained Wasserstein distance between two MDPDs.

    Both MDPDs must come from the same quantization; the result is
    (summed matching cost over all levels)^(1/q).
    """
    if q <= 0:
        raise DistanceError(f"q must be positive, got {q}")
    if mdpd_f.spec is not None and mdpd_g.spec is not None \
            and mdpd_f.spec != mdpd_g.spec:
        raise DistanceError("quantization specs differ")
    nf, ng = mdpd_f.n, mdpd_g.n
    if nf is not None and ng is not None and nf != ng:
        raise DistanceError(f"field counts differ: {nf} vs {ng}")
    f, g = mdpd_f, mdpd_g
    swapped = False
    kf, kg = _canonical_key(f), _canonical_key(g)
    if kg < kf:
        f, g, swapped = g, f, True
    elif kf == kg:
        # identical point multisets match themselves at zero cost
        return DistanceResult(0.0, q, [] if with_transcript else None)
    n = f.n or g.n
    if n is None:
        return DistanceResult(0.0, q, [] if with_transcript else None)
    sink: list[dict] | None = [] if with_transcript else None
    total = _match_group(list(f.points), list(g.points), 0, n - 2, q,
                         sink, (), swapped)
    return DistanceResult(float(total) ** (1.0 / q), q, sink)


def reeb_wasserstein(pd_f: PersistenceDiagram, pd_g: PersistenceDiagram,
                     k: int, q: float) -> float:
    """Wasserstein distance between the dimension-k parts of two diagrams.

    Ordinary and extended points of the same dimension compete in one
    pool; unmatched points pay half their persistence.
    """
    if q <= 0:
        raise DistanceError(f"q must be positive, got {q}")
    a = [(p.birth, p.death) for p in pd_f.of_dim(k)]
    b = [(p.birth, p.death) for p in pd_g.of_dim(k)]
    na, nb = len(a), len(b)
    if na == 0 and nb == 0:
        return 0.0
    size = na + nb
    costs = np.zeros((size, size))
    if na and nb:
        ac, bc = np.array(a), np.array(b)
        costs[:na, :nb] = np.abs(ac[:, None, :] - bc[None, :, :]).max(axis=2) ** q
    for i, (birth, death) in enumerate(a):
        costs[i, nb:] = (abs(death - birth) / 2.0) ** q
    for j, (birth, death) in enumerate(b):
        costs[na:, j] = (abs(death - birth) / 2.0) ** q
    _, total = _solve_lap(costs)
    return float(total) ** (1.0 / q)
