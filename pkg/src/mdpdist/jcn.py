"""Joint Contour Net: the quantized Reeb space of a multi-field.

Each field range is cut into ``q`` equal-width bins.  Vertices sharing an
identical quantized level tuple are merged along carrier edges
(union-find); the resulting components are the joint contours, and a JCN
edge records carrier adjacency between two distinct contours.

The construction quantizes at vertices rather than subdividing cells
against the quantization hyperplanes; it converges to the cell-exact net
as the quantization refines and preserves the adjacency structure the
rest of the pipeline consumes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .mesh import MultiField


class JCNError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    """Quantization of one field: [range_min, range_max) cut into level_count bins."""

    range_min: float
    range_max: float
    level_count: int

    def __post_init__(self):
        if not (self.range_max > self.range_min):
            raise JCNError(f"range_max must exceed range_min, got [{self.range_min}, {self.range_max}]")
        if self.level_count < 1:
            raise JCNError(f"level_count must be >= 1, got {self.level_count}")

    @property
    def width(self) -> float:
        return (self.range_max - self.range_min) / self.level_count

    def level_value(self, level: int) -> float:
        """Representative value of a level: the lower bin boundary."""
        return self.range_min + level * self.width


@dataclass(frozen=True)
class QuantizationSpec:
    """Per-field quantization; total resolution is the product of level counts."""

    fields: tuple[FieldSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.fields:
            raise JCNError("QuantizationSpec needs at least one field")

    @property
    def n(self) -> int:
        return len(self.fields)

    @property
    def total_levels(self) -> int:
        out = 1
        for f in self.fields:
            out *= f.level_count
        return out

    def to_dict(self) -> dict:
        return {
            "fields": [
                {"range_min": f.range_min, "range_max": f.range_max, "level_count": f.level_count}
                for f in self.fields
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuantizationSpec":
        return cls(tuple(FieldSpec(f["range_min"], f["range_max"], int(f["level_count"]))
                         for f in d["fields"]))

    @classmethod
    def uniform(cls, ranges: list[tuple[float, float]], levels: list[int]) -> "QuantizationSpec":
        if len(ranges) != len(levels):
            raise JCNError("ranges and levels must align")
        return cls(tuple(FieldSpec(lo, hi, q) for (lo, hi), q in zip(ranges, levels)))


def quantize(value: float, field_spec: FieldSpec) -> int:
    """Map a value to its level index, clamped into [0, level_count - 1].

    The bin rule is floor((value - range_min) / width); the top of the
    range lands in the last bin rather than one past it.
    """
    if not np.isfinite(value):
        raise JCNError(f"cannot quantize non-finite value {value}")
    level = int(np.floor((value - field_spec.range_min) / field_spec.width))
    return max(0, min(field_spec.level_count - 1, level))


def quantize_array(values: np.ndarray, field_spec: FieldSpec) -> np.ndarray:
    levels = np.floor((np.asarray(values, dtype=float) - field_spec.range_min) / field_spec.width)
    return np.clip(levels, 0, field_spec.level_count - 1).astype(int)


class _UnionFind:
    __slots__ = ("parent", "rank")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass
class JCNNode:
    id: int
    levels: tuple[int, ...]
    members: tuple[int, ...]  # carrier vertex ids, sorted

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class JointContourNet:
    spec: QuantizationSpec
    nodes: list[JCNNode]
    edges: list[tuple[int, int]]  # sorted pairs of node ids, sorted list

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def to_dict(self, with_members: bool = False) -> dict:
        nodes = []
        for nd in self.nodes:
            entry = {"id": nd.id, "levels": list(nd.levels), "size": nd.size}
            if with_members:
                entry["members"] = list(nd.members)
            nodes.append(entry)
        return {
            "spec": self.spec.to_dict(),
            "nodes": nodes,
            "edges": [list(e) for e in self.edges],
        }

    def save(self, path: str, with_members: bool = False) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(with_members), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "JointContourNet":
        spec = QuantizationSpec.from_dict(d["spec"])
        nodes = [
            JCNNode(int(nd["id"]), tuple(int(l) for l in nd["levels"]),
                    tuple(nd.get("members", [])))
            for nd in d["nodes"]
        ]
        edges = [tuple(int(x) for x in e) for e in d["edges"]]
        return cls(spec, nodes, edges)


def build_jcn(mf: MultiField, spec: QuantizationSpec) -> JointContourNet:
    """Build the Joint Contour Net of a multi-field under a quantization.

    Nodes are connected components of equal-level-tuple vertices under
    carrier-edge adjacency, ordered by their minimal member vertex id.
    """
    if spec.n != mf.n:
        raise JCNError(f"spec has {spec.n} fields, multi-field has {mf.n}")
    nv = mf.carrier.vertex_count
    if nv == 0:
        raise JCNError("empty carrier")

    level_cols = [quantize_array(f.values, fs) for f, fs in zip(mf.fields, spec.fields)]
    levels = np.stack(level_cols, axis=1)  # (V, n)

    edges = np.asarray(mf.carrier.edges, dtype=int).reshape(-1, 2)
    uf = _UnionFind(nv)
    if len(edges):
        same = np.all(levels[edges[:, 0]] == levels[edges[:, 1]], axis=1)
        for a, b in edges[same]:
            uf.union(int(a), int(b))

    # components keyed by root, then renumbered by minimal member vertex id
    members: dict[int, list[int]] = {}
    for v in range(nv):
        members.setdefault(uf.find(v), []).append(v)
    comps = sorted(members.values(), key=lambda m: m[0])
    node_of_vertex = np.empty(nv, dtype=int)
    nodes = []
    for nid, mem in enumerate(comps):
        node_of_vertex[mem] = nid
        nodes.append(JCNNode(nid, tuple(int(l) for l in levels[mem[0]]), tuple(mem)))

    edge_set = set()
    for a, b in edges:
        na, nb = int(node_of_vertex[a]), int(node_of_vertex[b])
        if na != nb:
            edge_set.add((min(na, nb), max(na, nb)))
    return JointContourNet(spec, nodes, sorted(edge_set))
