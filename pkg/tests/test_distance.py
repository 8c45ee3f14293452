"""Constrained Wasserstein distance between MDPDs."""
from __future__ import annotations

import numpy as np
import pytest

from mdpdist.distance import (DiagonalSet, DistanceError, diagonal_cost,
                              inner_distance, mdrg_distance, reeb_wasserstein)
from mdpdist.jcn import QuantizationSpec
from mdpdist.mdpd import MDPD, MDPDPoint
from mdpdist.persistence import (EXTENDED0, EXTENDED1, ORDINARY0,
                                 PersistenceDiagram, point)

from oracles import brute_inner, brute_mdpd_distance
from synthetic import random_mdpd


def _kind_for(b, d):
    if b < d:
        return ORDINARY0
    return EXTENDED0 if b == d else EXTENDED1


def mp(b1, d1, b2, d2, node=0, level=0, k1=None, k2=None) -> MDPDPoint:
    k1 = k1 or _kind_for(b1, d1)
    k2 = k2 or _kind_for(b2, d2)
    return MDPDPoint((point(float(b1), float(d1), k1),
                      point(float(b2), float(d2), k2)), (node,), (level,))


def mdpd_of(*pts) -> MDPD:
    return MDPD(list(pts), spec=None)


# ----------------------------------------------------- scalar-field distance

def test_rw_identical_zero():
    pd = PersistenceDiagram((point(0.0, 1.0, ORDINARY0),
                             point(0.0, 2.0, EXTENDED0)), source="a")
    assert reeb_wasserstein(pd, pd, 0, 1.0) == 0.0


def test_rw_single_point_vs_empty():
    pd = PersistenceDiagram((point(0.0, 1.0, ORDINARY0),), source="a")
    empty = PersistenceDiagram((), source="b")
    assert reeb_wasserstein(pd, empty, 0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_rw_derived_two_matchings():
    a = PersistenceDiagram((point(0.0, 2.0, ORDINARY0),), source="a")
    b = PersistenceDiagram((point(0.0, 1.0, ORDINARY0),), source="b")
    # direct match costs 1; both-to-diagonal costs 1 + 0.5
    assert reeb_wasserstein(a, b, 0, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_rw_dim_restriction():
    a = PersistenceDiagram((point(3.0, 0.0, EXTENDED1),), source="a")
    b = PersistenceDiagram((), source="b")
    assert reeb_wasserstein(a, b, 0, 1.0) == 0.0
    assert reeb_wasserstein(a, b, 1, 1.0) == pytest.approx(1.5, abs=1e-15)


def test_rw_kind_folding_dim0():
    # ordinary0 and extended0 live in the same dimension class
    a = PersistenceDiagram((point(0.0, 1.0, ORDINARY0),), source="a")
    b = PersistenceDiagram((point(0.0, 1.0, EXTENDED0),), source="b")
    assert reeb_wasserstein(a, b, 0, 1.0) == 0.0


# ----------------------------------------------------- inner distance

def test_inner_identical_zero():
    a = [mp(0, 1, 0, 0.5)]
    assert inner_distance(a, a, 1.0) == 0.0


def test_inner_single_pair():
    a = [mp(0, 1, 0, 0.5)]
    b = [mp(0, 1, 0, 0.3)]
    assert inner_distance(a, b, 1.0) == pytest.approx(0.2, abs=1e-15)


def test_inner_dims_mismatch_forces_diagonals():
    a = [mp(0, 1, 0, 0.5)]
    b = [MDPDPoint((point(0.0, 1.0, ORDINARY0), point(0.5, 0.0, EXTENDED1)),
                   (0,), (0,))]
    assert inner_distance(a, b, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_inner_level_mismatch_rejected():
    a = [mp(0, 1, 0, 0.5, level=0)]
    b = [mp(0, 1, 0, 0.5, level=1)]
    with pytest.raises(DistanceError):
        inner_distance(a, b, 1.0)


def test_inner_matches_brute_enumeration():
    rng = np.random.default_rng(71)
    for _ in range(60):
        na, nb = rng.integers(0, 5, size=2)
        a = [mp(*np.round(rng.random(4) * 2, 2)) for _ in range(na)]
        b = [mp(*np.round(rng.random(4) * 2, 2)) for _ in range(nb)]
        for q in (1.0, 2.0):
            got = inner_distance(a, b, q)
            want = brute_inner(a, b, q)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


# ----------------------------------------------------- diagonal cost

def test_diagonal_cost_values():
    assert diagonal_cost([], 1.0) == 0.0
    assert diagonal_cost([mp(0, 1, 0, 0.5)], 1.0) == pytest.approx(0.5, abs=1e-15)
    assert diagonal_cost([mp(0, 1, 0, 0.5)], 2.0) == pytest.approx(0.25, abs=1e-15)


def test_diagonal_set_projection():
    ds = DiagonalSet.of([mp(0, 1, 0, 0.5)])
    for factors in ds.points:
        for b, d in factors:
            assert b == d


# ----------------------------------------------------- mdrg distance

def test_mdrg_distance_self_zero():
    m = mdpd_of(mp(0, 1, 0, 0.5), mp(0, 2, 0, 0.3, node=1, level=1))
    r = mdrg_distance(m, m, q=2.0)
    assert r.value == 0.0


def test_mdrg_distance_single_pair():
    f = mdpd_of(mp(0, 1, 0, 0.5))
    g = mdpd_of(mp(0, 1, 0, 0.3))
    assert mdrg_distance(f, g, q=1.0).value == pytest.approx(0.2, abs=1e-15)


def test_mdrg_distance_levels_forbid_match():
    f = mdpd_of(mp(0, 1, 0, 0.5, node=0, level=0))
    g = mdpd_of(mp(0, 1, 0, 0.5, node=0, level=1))
    assert mdrg_distance(f, g, q=1.0).value == pytest.approx(1.0, abs=1e-15)


def test_mdrg_distance_symmetry_exact():
    rng = np.random.default_rng(72)
    for _ in range(40):
        f, g = random_mdpd(rng), random_mdpd(rng)
        for q in (1.0, 2.0, 3.0):
            ab = mdrg_distance(f, g, q=q).value
            ba = mdrg_distance(g, f, q=q).value
            assert ab == ba
            assert ab >= 0.0


def test_mdrg_distance_triangle():
    rng = np.random.default_rng(73)
    for _ in range(40):
        a, b, c = (random_mdpd(rng) for _ in range(3))
        for q in (1.0, 2.0):
            dab = mdrg_distance(a, b, q=q).value
            dbc = mdrg_distance(b, c, q=q).value
            dac = mdrg_distance(a, c, q=q).value
            assert dac <= dab + dbc + 1e-9


def test_mdrg_distance_matches_admissible_brute():
    rng = np.random.default_rng(74)
    for _ in range(60):
        f, g = random_mdpd(rng, 5), random_mdpd(rng, 5)
        for q in (1.0, 2.0):
            got = mdrg_distance(f, g, q=q).value
            want = brute_mdpd_distance(f, g, q)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_mdrg_distance_spec_mismatch():
    s1 = QuantizationSpec.uniform([(0.0, 1.0), (0.0, 1.0)], [2, 2])
    s2 = QuantizationSpec.uniform([(0.0, 1.0), (0.0, 1.0)], [2, 3])
    f = MDPD([mp(0, 1, 0, 0.5)], spec=s1)
    g = MDPD([mp(0, 1, 0, 0.5)], spec=s2)
    with pytest.raises(DistanceError):
        mdrg_distance(f, g)


def test_mdrg_distance_q_validation():
    f = mdpd_of(mp(0, 1, 0, 0.5))
    with pytest.raises(DistanceError):
        mdrg_distance(f, f, q=0.0)
    with pytest.raises(DistanceError):
        mdrg_distance(f, f, q=-1.0)


def test_mdrg_distance_field_count_mismatch():
    f = mdpd_of(mp(0, 1, 0, 0.5))
    g = MDPD([MDPDPoint((point(0.0, 1.0, EXTENDED0),) * 3, (0, 0), (0, 0))],
             spec=None)
    with pytest.raises(DistanceError):
        mdrg_distance(f, g)


def test_mdrg_distance_empty_inputs():
    e = MDPD([], spec=None)
    assert mdrg_distance(e, e).value == 0.0
    f = mdpd_of(mp(0, 2, 0, 1))
    # lone side pays its own diagonal: half of max(2, 1), raised and rooted
    assert mdrg_distance(f, e, q=1.0).value == pytest.approx(1.0, abs=1e-15)
    assert mdrg_distance(f, e, q=2.0).value == pytest.approx(1.0, abs=1e-15)


def test_transcript_records_pairs():
    f = mdpd_of(mp(0, 1, 0, 0.5), mp(0, 1, 0.1, 0.4, node=1, level=1))
    g = mdpd_of(mp(0, 1, 0, 0.3))
    r = mdrg_distance(f, g, q=1.0, with_transcript=True)
    assert r.transcript
    paired = [t for t in r.transcript if t["pair"][0] is not None
              and t["pair"][1] is not None]
    assert paired
    for t in r.transcript:
        assert t["cost"] >= 0.0


def test_three_field_toy():
    def mp3(vals, nodes, levels):
        factors = tuple(point(b, d, EXTENDED0 if b >= d else ORDINARY0)
                        for b, d in vals)
        return MDPDPoint(factors, nodes, levels)

    f = MDPD([mp3([(0, 1), (0, 0.5), (0, 0.4)], (0, 0), (0, 0))], spec=None)
    g = MDPD([mp3([(0, 1), (0, 0.5), (0, 0.2)], (0, 0), (0, 0))], spec=None)
    assert mdrg_distance(f, g, q=1.0).value == pytest.approx(0.2, abs=1e-15)
    # level mismatch at the second descent forbids the match; each side
    # pays half its largest factor interval, 0.5 + 0.5
    h = MDPD([mp3([(0, 1), (0, 0.5), (0, 0.2)], (0, 0), (0, 1))], spec=None)
    assert mdrg_distance(f, h, q=1.0).value == pytest.approx(1.0, abs=1e-15)


def test_class_cost_reduced_path_matches_square(monkeypatch):
    import mdpdist.distance as dist
    rng = np.random.default_rng(97)
    for q in (1.0, 2.0):
        pts_a = [mp(*np.round(rng.random(4) * 3, 2)) for _ in range(40)]
        pts_b = [mp(*np.round(rng.random(4) * 3, 2)) for _ in range(35)]
        square = dist._class_cost(pts_a, pts_b, q)
        monkeypatch.setattr(dist, "_REDUCED_MIN", 0)
        reduced = dist._class_cost(pts_a, pts_b, q)
        monkeypatch.undo()
        assert reduced == pytest.approx(square, rel=1e-12, abs=1e-12)


def test_mdrg_distance_reduced_path_equivalent(monkeypatch):
    import mdpdist.distance as dist
    rng = np.random.default_rng(98)
    pairs = [(random_mdpd(rng), random_mdpd(rng)) for _ in range(20)]
    want = [mdrg_distance(f, g, q=2.0).value for f, g in pairs]
    monkeypatch.setattr(dist, "_REDUCED_MIN", 0)
    got = [mdrg_distance(f, g, q=2.0).value for f, g in pairs]
    for w, t in zip(want, got):
        assert t == pytest.approx(w, rel=1e-12, abs=1e-12)
