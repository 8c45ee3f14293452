"""Persistence diagrams of Reeb graphs.

The diagram of a Reeb graph combines three classes of birth-death pairs:

* ordinary dimension-0 pairs from the sublevel sweep (a down-fork kills
  the most recently born minimum) together with the mirrored pairs of the
  superlevel sweep (an up-fork kills a maximum), the latter recorded as
  (saddle value, extremum value);
* one extended dimension-0 pair per connected component, pairing the
  component's global minimum with its global maximum (this replaces the
  infinite-persistence point, which never appears in the output);
* extended dimension-1 pairs matching each essential down-fork with its
  essential up-fork, written (birth, death) with birth >= death.

All classes come out of a single boundary-matrix reduction over the
coned complex of each connected component: ordinary simplices enter in
ascending order, then the cone vertex, then cone simplices in descending
order.  Within one component the cone vertex always captures the cone
edge over the component maximum, and the component minimum is the one
simplex left unpaired; together they yield the extended-0 pair.  The
reduction runs per component because gluing components into one cone
mixes their essential classes across components.

Degenerate nodes (multi-way forks, forked extrema, repeated critical
values) must be resolved first; ``resolve_degeneracies`` splits them
into chains of simple nodes at values offset by multiples of epsilon.
"""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field

from .jcn import _UnionFind
from .reeb import ReebGraph, ReebNode

ORDINARY0 = "ordinary0"
EXTENDED0 = "extended0"
EXTENDED1 = "extended1"
_KINDS = (ORDINARY0, EXTENDED0, EXTENDED1)


class DegeneracyError(ValueError):
    """A Reeb graph violates the simple-node (Morse) conditions."""


class EpsilonError(ValueError):
    """Epsilon is unusable: non-positive, or large enough to reorder levels."""


@dataclass(frozen=True, order=True)
class PersistencePoint:
    birth: float
    death: float
    dim: int
    kind: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == ORDINARY0 and not self.birth < self.death:
            raise ValueError(f"ordinary0 needs birth < death, got ({self.birth}, {self.death})")
        if self.kind == EXTENDED0 and not self.birth <= self.death:
            raise ValueError(f"extended0 needs birth <= death, got ({self.birth}, {self.death})")
        if self.kind == EXTENDED1 and not self.birth >= self.death:
            raise ValueError(f"extended1 needs birth >= death, got ({self.birth}, {self.death})")

    @property
    def persistence(self) -> float:
        return abs(self.death - self.birth)

    def to_dict(self) -> dict:
        return {"birth": self.birth, "death": self.death, "dim": self.dim, "kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "PersistencePoint":
        return cls(float(d["birth"]), float(d["death"]), int(d["dim"]), str(d["kind"]))


def point(birth: float, death: float, kind: str) -> PersistencePoint:
    return PersistencePoint(birth, death, 1 if kind == EXTENDED1 else 0, kind)


@dataclass
class PersistenceDiagram:
    points: list[PersistencePoint] = field(default_factory=list)
    source: str = ""

    def __post_init__(self):
        self.points = sorted(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def of_kind(self, kind: str) -> list[PersistencePoint]:
        return [p for p in self.points if p.kind == kind]

    def of_dim(self, dim: int) -> list[PersistencePoint]:
        return [p for p in self.points if p.dim == dim]

    def to_list(self) -> list[dict]:
        return [p.to_dict() for p in self.points]

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_list(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_list(cls, lst: list[dict], source: str = "") -> "PersistenceDiagram":
        return cls([PersistencePoint.from_dict(d) for d in lst], source)


_SIMPLE_DEGREES = {(0, 0), (0, 1), (1, 0), (1, 1), (2, 1), (1, 2)}


def _neighbor_split(rg: ReebGraph):
    """Per node: sorted lists of up- and down-neighbors under the (value, id) order."""
    adj = rg.adjacency()
    key = {nd.id: (nd.value, nd.id) for nd in rg.nodes}
    ups, downs = {}, {}
    for nd in rg.nodes:
        nbrs = adj[nd.id]
        ups[nd.id] = sorted((u for u in nbrs if key[u] > key[nd.id]), key=key.__getitem__)
        downs[nd.id] = sorted((u for u in nbrs if key[u] < key[nd.id]), key=key.__getitem__)
    return ups, downs


def resolve_degeneracies(rg: ReebGraph, epsilon: float) -> ReebGraph:
    """Split degenerate nodes into simple ones and separate tied values.

    After resolution every node's (up-degree, down-degree) lies in
    {(0,1), (1,0), (1,1), (2,1), (1,2)} (isolated nodes stay (0,0)), all
    values are pairwise distinct, and component count and cycle rank are
    unchanged.  Ties are ordered by node id; split chains grow upward
    from the original value in epsilon steps.

    Raises
    ------
    EpsilonError
        If epsilon <= 0, epsilon >= half the minimum gap between distinct
        node values, or accumulated offsets would reach the next value.
    """
    if epsilon <= 0:
        raise EpsilonError(f"epsilon must be positive, got {epsilon}")
    distinct = sorted({nd.value for nd in rg.nodes})
    min_gap = min((b - a for a, b in zip(distinct, distinct[1:])), default=None)
    if min_gap is not None and not epsilon < 0.5 * min_gap:
        raise EpsilonError(
            f"epsilon {epsilon} not below half the minimum level gap {min_gap}")

    ups, downs = _neighbor_split(rg)

    # slot = (original value, original id, piece index); ports route each
    # original neighbor relation to the piece that carries it after splitting
    slots: list[tuple[float, int, int]] = []
    piece_node: dict[tuple[int, int], int] = {}  # (orig id, piece) -> new id
    up_port: dict[int, list[int]] = {}
    down_port: dict[int, list[int]] = {}
    chain_edges: list[tuple[tuple[int, int], tuple[int, int]]] = []

    for nd in sorted(rg.nodes, key=lambda n: n.id):
        u, d = len(ups[nd.id]), len(downs[nd.id])
        if (u, d) in _SIMPLE_DEGREES:
            pieces = 1
            up_port[nd.id] = [0] * u
            down_port[nd.id] = [0] * d
        else:
            dn_pieces = max(d - 1, 0)
            up_pieces = max(u - 1, 0)
            if d == 0:
                pieces = 1 + up_pieces  # minimum plus a chain of up-forks
                down_port[nd.id] = []
                up_port[nd.id] = [min(j + 1, pieces - 1) for j in range(u)]
            elif u == 0:
                pieces = dn_pieces + 1  # chain of down-forks plus the maximum
                up_port[nd.id] = []
                down_port[nd.id] = [max(j - 1, 0) for j in range(d)]
            else:
                pieces = dn_pieces + up_pieces
                down_port[nd.id] = [max(j - 1, 0) for j in range(d)] if dn_pieces else [0]
                up_port[nd.id] = [min(dn_pieces + j, pieces - 1) for j in range(u)] if up_pieces \
                    else [pieces - 1]
            for k in range(pieces - 1):
                chain_edges.append(((nd.id, k), (nd.id, k + 1)))
        for k in range(pieces):
            piece_node[(nd.id, k)] = -1  # id assigned after global ordering
            slots.append((nd.value, nd.id, k))

    slots.sort()
    node_meta = {nd.id: nd for nd in rg.nodes}
    new_nodes: list[ReebNode] = []
    prev_value = None
    for new_id, (value, oid, k) in enumerate(slots):
        piece_node[(oid, k)] = new_id
        v = value
        if prev_value is not None and v <= prev_value:
            v = prev_value + epsilon
        nxt = _next_distinct(distinct, value)
        if nxt is not None and v >= nxt:
            raise EpsilonError(
                f"epsilon {epsilon} too large: offsets from value {value} reach {nxt}")
        prev_value = v
        src = node_meta[oid]
        new_nodes.append(ReebNode(new_id, src.level, v, src.members))

    new_arcs = set()
    for (pa, pb) in chain_edges:
        a, b = piece_node[pa], piece_node[pb]
        new_arcs.add((min(a, b), max(a, b)))
    key = {nd.id: (nd.value, nd.id) for nd in rg.nodes}
    for a, b in rg.arcs:
        lo, hi = (a, b) if key[a] < key[b] else (b, a)
        j_up = ups[lo].index(hi)
        j_dn = downs[hi].index(lo)
        na = piece_node[(lo, up_port[lo][j_up])]
        nb = piece_node[(hi, down_port[hi][j_dn])]
        new_arcs.add((min(na, nb), max(na, nb)))

    out = ReebGraph(rg.field_index, new_nodes, sorted(new_arcs))
    if out.component_count() != rg.component_count() or out.cycle_rank() != rg.cycle_rank():
        raise AssertionError("degeneracy resolution altered graph topology")
    return out


def _next_distinct(sorted_values: list[float], v: float):
    i = bisect.bisect_right(sorted_values, v)
    return sorted_values[i] if i < len(sorted_values) else None


def check_resolved(rg: ReebGraph) -> None:
    """Raise DegeneracyError unless all nodes are simple with distinct values."""
    values = [nd.value for nd in rg.nodes]
    if len(set(values)) != len(values):
        raise DegeneracyError("repeated node values")
    ups, downs = _neighbor_split(rg)
    for nd in rg.nodes:
        deg = (len(ups[nd.id]), len(downs[nd.id]))
        if deg not in _SIMPLE_DEGREES:
            raise DegeneracyError(f"node {nd.id} has degenerate degrees {deg}")


# column kinds in the coned filtration
_VERT, _EDGE, _CONE_VERT, _CONE_EDGE, _CONE_TRI = range(5)


def compute_reeb_pd(rg: ReebGraph, source: str = "") -> PersistenceDiagram:
    """Extended persistence diagram of a resolved Reeb graph.

    Runs the coned-complex boundary reduction independently on every
    connected component and merges the resulting points.  Zero-length
    ordinary pairs (regular-node cancellations) are dropped; the
    extended-0 pair is kept even at zero length so each component
    contributes exactly one.
    """
    check_resolved(rg)
    uf = _UnionFind(len(rg.nodes))
    index = {nd.id: i for i, nd in enumerate(rg.nodes)}
    for a, b in rg.arcs:
        uf.union(index[a], index[b])
    comps: dict[int, list[int]] = {}
    for nd in rg.nodes:
        comps.setdefault(uf.find(index[nd.id]), []).append(nd.id)

    value = {nd.id: nd.value for nd in rg.nodes}
    points: list[PersistencePoint] = []
    for root in sorted(comps, key=lambda r: min(comps[r])):
        node_ids = sorted(comps[root])
        id_set = set(node_ids)
        arcs = [(a, b) for a, b in rg.arcs if a in id_set]
        points.extend(_component_pd(node_ids, arcs, value))
    return PersistenceDiagram(points, source)


def _component_pd(node_ids, arcs, value) -> list[PersistencePoint]:
    """Coned-complex reduction for one connected component."""
    # ascending part: vertices at their value, edges with their upper endpoint
    ordinary = [(_VERT, v, value[v]) for v in node_ids]
    ordinary += [(_EDGE, i, max(value[a], value[b])) for i, (a, b) in enumerate(arcs)]
    ordinary.sort(key=lambda c: (c[2], c[0], c[1]))
    # descending part, coned: cone edges with their vertex, cone triangles
    # with the lower endpoint of their base edge
    relative = [(_CONE_VERT, v, value[v]) for v in node_ids]
    relative += [(_CONE_TRI, i, min(value[a], value[b])) for i, (a, b) in enumerate(arcs)]
    relative.sort(key=lambda c: (-c[2], c[0], c[1]))

    columns = ordinary + [(_CONE_EDGE, None, None)] + relative
    row_of = {(k, ref): i for i, (k, ref, _) in enumerate(columns)}
    entry = {i: col[2] for i, col in enumerate(columns)}

    def boundary(col) -> int:
        kind, ref, _ = col
        if kind == _VERT or kind == _CONE_EDGE:
            return 0
        if kind == _EDGE:
            a, b = arcs[ref]
            return (1 << row_of[(_VERT, a)]) | (1 << row_of[(_VERT, b)])
        if kind == _CONE_VERT:
            return (1 << row_of[(_CONE_EDGE, None)]) | (1 << row_of[(_VERT, ref)])
        a, b = arcs[ref]  # _CONE_TRI
        return ((1 << row_of[(_CONE_VERT, a)])
                | (1 << row_of[(_CONE_VERT, b)])
                | (1 << row_of[(_EDGE, ref)]))

    low_owner: dict[int, int] = {}
    reduced: list[int] = []
    pairs: list[tuple[int, int]] = []  # (birth row, death column)
    for j, col in enumerate(columns):
        mask = boundary(col)
        while mask:
            low = mask.bit_length() - 1
            owner = low_owner.get(low)
            if owner is None:
                low_owner[low] = j
                pairs.append((low, j))
                break
            mask ^= reduced[owner]
        reduced.append(mask)

    paired_rows = {r for r, _ in pairs}
    paired_cols = {c for _, c in pairs}
    unpaired = [j for j in range(len(columns))
                if j not in paired_rows and j not in paired_cols]

    points: list[PersistencePoint] = []
    omega_death = None
    for r, c in pairs:
        bk, ck = columns[r][0], columns[c][0]
        if bk == _CONE_EDGE and ck == _CONE_VERT:
            omega_death = entry[c]  # the cone vertex absorbs the component maximum
        elif bk == _VERT and ck == _EDGE:
            if entry[r] != entry[c]:
                points.append(point(entry[r], entry[c], ORDINARY0))
        elif bk == _CONE_VERT and ck == _CONE_TRI:
            if entry[c] != entry[r]:
                points.append(point(entry[c], entry[r], ORDINARY0))
        elif bk == _EDGE and ck == _CONE_TRI:
            points.append(point(entry[r], entry[c], EXTENDED1))
        else:  # pragma: no cover - the cone admits no other pair shape on one component
            raise AssertionError(f"unexpected pair {columns[r]} -> {columns[c]}")

    if len(unpaired) != 1 or columns[unpaired[0]][0] != _VERT or omega_death is None:
        raise AssertionError("cone reduction lost the essential component class")
    points.append(point(entry[unpaired[0]], omega_death, EXTENDED0))
    return points


def sublevel_pairs(rg: ReebGraph) -> list[tuple[float, float]]:
    """Ascending elder-rule pairs (minimum value, down-fork value).

    Union-find fast path for the ordinary sublevel pairs; used as a
    cross-check of the matrix reduction, which remains the trusted path.
    """
    check_resolved(rg)
    adj = rg.adjacency()
    order = sorted(rg.nodes, key=lambda nd: nd.value)
    value = {nd.id: nd.value for nd in rg.nodes}
    uf = _UnionFind(len(rg.nodes))
    index = {nd.id: i for i, nd in enumerate(order)}
    birth: dict[int, float] = {}  # root index -> oldest birth value
    seen = set()
    out = []
    for nd in order:
        birth[index[nd.id]] = nd.value
        seen.add(nd.id)
        for nb in sorted(adj[nd.id], key=lambda x: (value[x], x)):
            if nb not in seen:
                continue
            ra, rb = uf.find(index[nd.id]), uf.find(index[nb])
            if ra == rb:
                continue  # essential join; no ordinary pair
            keep, kill = (ra, rb) if birth[ra] <= birth[rb] else (rb, ra)
            if birth[kill] != nd.value:
                out.append((birth[kill], nd.value))
            uf.union(ra, rb)
            birth[uf.find(ra)] = birth[keep]
    return sorted(out)
