"""Independent reference implementations used to cross-check the library.

Everything here is written against the underlying mathematics, not the
library code: dense matrix reduction instead of bitmask columns,
explicit permutation enumeration instead of the LAP solver, exhaustive
matching search instead of per-level assignment, and direct formula
transcription for the retrieval measures.
"""
from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter, defaultdict, deque

import numpy as np


# ----------------------------------------------------- extended persistence

def extended_pd_oracle(values: dict[int, float],
                       arcs: list[tuple[int, int]]) -> Counter:
    """Extended persistence of a graph, dense reduction per component.

    Returns a Counter of (birth, death, kind) with kind in
    {"ordinary0", "extended0", "extended1"}; zero-length ordinary pairs
    are dropped, the per-component extended0 pair is always present.
    """
    adj = defaultdict(list)
    for a, b in arcs:
        adj[a].append(b)
        adj[b].append(a)
    seen: set[int] = set()
    out: Counter = Counter()
    for start in sorted(values):
        if start in seen:
            continue
        comp = _bfs(start, adj)
        seen |= comp
        comp_arcs = [(a, b) for a, b in arcs if a in comp]
        out.update(_component_oracle({v: values[v] for v in comp}, comp_arcs))
    return out


def _bfs(start: int, adj) -> set[int]:
    comp = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in comp:
                comp.add(w)
                queue.append(w)
    return comp


def _component_oracle(values: dict[int, float],
                      arcs: list[tuple[int, int]]) -> Counter:
    verts = sorted(values)
    asc = [("v", v, values[v]) for v in verts]
    asc += [("e", i, max(values[a], values[b])) for i, (a, b) in enumerate(arcs)]
    asc.sort(key=lambda s: (s[2], 0 if s[0] == "v" else 1, s[1]))
    rel = [("cv", v, values[v]) for v in verts]
    rel += [("ce", i, min(values[a], values[b])) for i, (a, b) in enumerate(arcs)]
    rel.sort(key=lambda s: (-s[2], 0 if s[0] == "cv" else 1, s[1]))
    cols = asc + [("w", None, None)] + rel
    pos = {(kind, ref): i for i, (kind, ref, _) in enumerate(cols)}
    m = len(cols)

    matrix = np.zeros((m, m), dtype=bool)
    for j, (kind, ref, _) in enumerate(cols):
        if kind == "e":
            a, b = arcs[ref]
            matrix[pos[("v", a)], j] = True
            matrix[pos[("v", b)], j] = True
        elif kind == "cv":
            matrix[pos[("w", None)], j] = True
            matrix[pos[("v", ref)], j] = True
        elif kind == "ce":
            a, b = arcs[ref]
            matrix[pos[("cv", a)], j] = True
            matrix[pos[("cv", b)], j] = True
            matrix[pos[("e", ref)], j] = True

    def low(j: int) -> int:
        nz = np.flatnonzero(matrix[:, j])
        return int(nz[-1]) if nz.size else -1

    owner: dict[int, int] = {}
    for j in range(m):
        lj = low(j)
        while lj >= 0 and lj in owner:
            matrix[:, j] ^= matrix[:, owner[lj]]
            lj = low(j)
        if lj >= 0:
            owner[lj] = j

    entry = {i: c[2] for i, c in enumerate(cols)}
    pairs = [(r, j) for r, j in owner.items()]
    out: Counter = Counter()
    omega_pair_value = None
    for r, j in pairs:
        bk, ck = cols[r][0], cols[j][0]
        if bk == "w":
            omega_pair_value = entry[j]
        elif (bk, ck) == ("v", "e"):
            if entry[r] != entry[j]:
                out[(entry[r], entry[j], "ordinary0")] += 1
        elif (bk, ck) == ("cv", "ce"):
            if entry[j] != entry[r]:
                out[(entry[j], entry[r], "ordinary0")] += 1
        elif (bk, ck) == ("e", "ce"):
            out[(entry[r], entry[j], "extended1")] += 1
        else:
            raise AssertionError(f"unexpected oracle pair {cols[r]} {cols[j]}")
    paired = set(owner) | set(owner.values())
    free = [j for j in range(m) if j not in paired]
    assert len(free) == 1 and cols[free[0]][0] == "v", "essential class lost"
    assert omega_pair_value is not None
    out[(entry[free[0]], omega_pair_value, "extended0")] += 1
    return out


def pd_to_counter(pd) -> Counter:
    """Multiset view of a library PersistenceDiagram."""
    return Counter((p.birth, p.death, p.kind) for p in pd)


# ----------------------------------------------------------- assignment

def brute_assignment(costs: np.ndarray) -> tuple[tuple[int, ...], float]:
    """Lexicographically smallest minimal permutation, by enumeration."""
    k = costs.shape[0]
    best_perm, best_total = (), 0.0
    first = True
    for perm in itertools.permutations(range(k)):
        total = sum(costs[i, perm[i]] for i in range(k))
        if first or total < best_total:
            best_perm, best_total, first = perm, total, False
    return best_perm, float(best_total)


# ------------------------------------------------- exhaustive MDPD matching

def min_matching_cost(items_a: list, items_b: list, pair_cost, diag_a, diag_b) -> float:
    """Cheapest partial matching; unmatched items pay their diagonal."""
    nb = len(items_b)

    def rec(i: int, used: frozenset) -> float:
        if i == len(items_a):
            return sum(diag_b(items_b[j]) for j in range(nb) if j not in used)
        best = diag_a(items_a[i]) + rec(i + 1, used)
        for j in range(nb):
            if j not in used:
                c = pair_cost(items_a[i], items_b[j]) + rec(i + 1, used | {j})
                if c < best:
                    best = c
        return best

    return rec(0, frozenset())


def _pt_coords(pt) -> list[float]:
    return [c for x in pt.factors for c in (x.birth, x.death)]


def _pt_diag(pt, q: float) -> float:
    gap = max(abs(x.death - x.birth) for x in pt.factors) / 2.0
    return gap ** q


def brute_inner(fp: list, gp: list, q: float) -> float:
    """Exhaustive dimension-consistent point matching cost."""
    total = 0.0
    for dims in sorted({p.dims for p in fp} | {p.dims for p in gp}):
        a = [p for p in fp if p.dims == dims]
        b = [p for p in gp if p.dims == dims]
        total += min_matching_cost(
            a, b,
            lambda x, y: max(abs(u - v) for u, v in
                             zip(_pt_coords(x), _pt_coords(y))) ** q,
            lambda x: _pt_diag(x, q),
            lambda y: _pt_diag(y, q))
    return total


def brute_mdpd_distance(mdpd_f, mdpd_g, q: float) -> float:
    """Exhaustive search over level-, node-, and dimension-consistent matchings."""
    fpts, gpts = list(mdpd_f.points), list(mdpd_g.points)
    n = fpts[0].n if fpts else (gpts[0].n if gpts else None)
    if n is None:
        return 0.0
    return _brute_level(fpts, gpts, 0, n - 2, q) ** (1.0 / q)


def _brute_level(fpts, gpts, depth: int, last: int, q: float) -> float:
    groups_f: dict[int, dict[int, list]] = defaultdict(lambda: defaultdict(list))
    groups_g: dict[int, dict[int, list]] = defaultdict(lambda: defaultdict(list))
    for p in fpts:
        groups_f[p.level_path[depth]][p.node_path[depth]].append(p)
    for p in gpts:
        groups_g[p.level_path[depth]][p.node_path[depth]].append(p)
    total = 0.0
    for level in sorted(set(groups_f) | set(groups_g)):
        fnodes = sorted(groups_f[level])
        gnodes = sorted(groups_g[level])

        def node_cost(p, p2, _lvl=level):
            fs, gs = groups_f[_lvl][p], groups_g[_lvl][p2]
            if depth == last:
                return brute_inner(fs, gs, q)
            return _brute_level(fs, gs, depth + 1, last, q)

        def node_diag_f(p, _lvl=level):
            return sum(_pt_diag(x, q) for x in groups_f[_lvl][p])

        def node_diag_g(p, _lvl=level):
            return sum(_pt_diag(x, q) for x in groups_g[_lvl][p])

        total += min_matching_cost(fnodes, gnodes, node_cost,
                                   node_diag_f, node_diag_g)
    return total


# ------------------------------------------------------------- geodesics

def dijkstra_oracle(n: int, edges: list[tuple[int, int, float]]) -> np.ndarray:
    """All-pairs shortest paths by per-source Dijkstra with a heap."""
    adj = defaultdict(list)
    for a, b, w in edges:
        adj[a].append((b, w))
        adj[b].append((a, w))
    out = np.full((n, n), np.inf)
    for src in range(n):
        dist = {src: 0.0}
        heap = [(0.0, src)]
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist.get(v, math.inf):
                continue
            for w, wt in adj[v]:
                nd = d + wt
                if nd < dist.get(w, math.inf):
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        for v, d in dist.items():
            out[src, v] = d
    return out


# ------------------------------------------------------------- retrieval

def retrieval_oracle(values: np.ndarray, ids: list[str], labels: list[str],
                     e_k: int = 32) -> dict:
    """NN/FT/ST/E/DCG by direct transcription of the definitions."""
    n = len(ids)
    sums = dict.fromkeys(("nn", "ft", "st", "e_measure", "dcg"), 0.0)
    used = 0
    for qi in range(n):
        cls = labels[qi]
        rel = sum(1 for j in range(n) if j != qi and labels[j] == cls)
        if rel == 0:
            continue
        ranked = sorted((j for j in range(n) if j != qi),
                        key=lambda j: (values[qi][j], ids[j]))
        flags = [1 if labels[j] == cls else 0 for j in ranked]
        sums["nn"] += flags[0]
        sums["ft"] += sum(flags[:rel]) / rel
        sums["st"] += sum(flags[:2 * rel]) / rel
        k = min(e_k, len(ranked))
        hits = sum(flags[:k])
        if hits:
            prec, rec = hits / k, hits / rel
            sums["e_measure"] += 2.0 / (1.0 / prec + 1.0 / rec)
        gain = flags[0] + sum(flags[i] / math.log2(i + 1)
                              for i in range(1, len(flags)))
        ideal = 1 + sum(1 / math.log2(i + 1) for i in range(1, rel))
        sums["dcg"] += gain / ideal
        used += 1
    return {k: v / used for k, v in sums.items()}
