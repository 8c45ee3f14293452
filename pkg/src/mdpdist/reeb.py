"""Multi-Dimensional Reeb Graphs over a Joint Contour Net.

The first field's quantized Reeb graph is obtained by merging JCN nodes
of equal first-field level along JCN edges.  Every node of that graph
restricts the net to its member contours, and the next field's Reeb
graph of the restriction becomes its child; recursing through all fields
yields the MDRG hierarchy.  Leaf graphs quantize the last field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .jcn import JCNError, JointContourNet, _UnionFind


@dataclass
class ReebNode:
    id: int
    level: int
    value: float  # representative f-bar value: lower bin boundary of the level
    members: tuple[int, ...]  # JCN node ids, sorted


@dataclass
class ReebGraph:
    """Quantized Reeb graph of one component field over a JCN subgraph."""

    field_index: int
    nodes: list[ReebNode]
    arcs: list[tuple[int, int]]  # sorted node-id pairs, sorted list

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def node(self, nid: int) -> ReebNode:
        return self.nodes[nid]

    def neighbors(self, nid: int) -> list[int]:
        out = []
        for a, b in self.arcs:
            if a == nid:
                out.append(b)
            elif b == nid:
                out.append(a)
        return out

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {nd.id: [] for nd in self.nodes}
        for a, b in self.arcs:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def component_count(self) -> int:
        uf = _UnionFind(len(self.nodes))
        for a, b in self.arcs:
            uf.union(a, b)
        return len({uf.find(i) for i in range(len(self.nodes))})

    def cycle_rank(self) -> int:
        return len(self.arcs) - len(self.nodes) + self.component_count()


@dataclass
class MDRG:
    """A Reeb graph plus, per node, the subtree for the next field."""

    graph: ReebGraph
    children: dict[int, "MDRG"] = field(default_factory=dict)  # node id -> subtree

    @property
    def depth(self) -> int:
        if not self.children:
            return 1
        return 1 + next(iter(self.children.values())).depth

    def walk(self, prefix: tuple[int, ...] = ()):
        """Yield (node_path_prefix, graph) for this graph and every descendant."""
        yield prefix, self.graph
        for nid in sorted(self.children):
            yield from self.children[nid].walk(prefix + (nid,))

    def to_dict(self) -> dict:
        d = {
            "field_index": self.graph.field_index,
            "nodes": [
                {"id": nd.id, "level": nd.level, "value": nd.value, "members": list(nd.members)}
                for nd in self.graph.nodes
            ],
            "arcs": [list(a) for a in self.graph.arcs],
        }
        if self.children:
            d["children"] = {str(nid): sub.to_dict() for nid, sub in sorted(self.children.items())}
        return d

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "MDRG":
        graph = ReebGraph(
            int(d["field_index"]),
            [ReebNode(int(nd["id"]), int(nd["level"]), float(nd["value"]),
                      tuple(int(m) for m in nd["members"]))
             for nd in d["nodes"]],
            [tuple(int(x) for x in a) for a in d["arcs"]],
        )
        children = {int(k): cls.from_dict(v) for k, v in d.get("children", {}).items()}
        return cls(graph, children)


def extract_reeb(jcn: JointContourNet, field_index: int,
                 node_ids: list[int] | None = None) -> ReebGraph:
    """Reeb graph of one field over a JCN subgraph.

    Parameters
    ----------
    jcn : JointContourNet
    field_index : int
        Which component field's levels drive the merge.
    node_ids : list of int, optional
        JCN node ids inducing the subgraph; the whole net when omitted.
    """
    if node_ids is None:
        node_ids = [nd.id for nd in jcn.nodes]
    if not node_ids:
        raise JCNError("empty JCN subgraph")
    id_set = set(node_ids)
    index_of = {nid: i for i, nid in enumerate(node_ids)}

    uf = _UnionFind(len(node_ids))
    sub_edges = []
    for a, b in jcn.edges:
        if a in id_set and b in id_set:
            sub_edges.append((a, b))
            if jcn.nodes[a].levels[field_index] == jcn.nodes[b].levels[field_index]:
                uf.union(index_of[a], index_of[b])

    members: dict[int, list[int]] = {}
    for nid in node_ids:
        members.setdefault(uf.find(index_of[nid]), []).append(nid)
    comps = sorted(members.values(), key=lambda m: min(m))
    fs = jcn.spec.fields[field_index]
    reeb_of: dict[int, int] = {}
    nodes = []
    for rid, mem in enumerate(comps):
        mem = sorted(mem)
        for nid in mem:
            reeb_of[nid] = rid
        level = jcn.nodes[mem[0]].levels[field_index]
        nodes.append(ReebNode(rid, level, fs.level_value(level), tuple(mem)))

    arc_set = set()
    for a, b in sub_edges:
        ra, rb = reeb_of[a], reeb_of[b]
        if ra != rb:
            arc_set.add((min(ra, rb), max(ra, rb)))
    return ReebGraph(field_index, nodes, sorted(arc_set))


def build_mdrg(jcn: JointContourNet) -> MDRG:
    """Hierarchical Reeb-graph decomposition across all fields in order."""
    return _build_level(jcn, 0, None)


def _build_level(jcn: JointContourNet, field_index: int,
                 node_ids: list[int] | None) -> MDRG:
    graph = extract_reeb(jcn, field_index, node_ids)
    tree = MDRG(graph)
    if field_index + 1 < jcn.spec.n:
        for nd in graph.nodes:
            tree.children[nd.id] = _build_level(jcn, field_index + 1, list(nd.members))
    return tree
