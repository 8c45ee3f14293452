"""Multi-dimensional persistence diagrams.

An MDPD point is an ordered tuple of per-field persistence points: the
first factor comes from the Reeb graph of the first field, and each
later factor comes from the child Reeb graph hanging off a node whose
representative value lies inside the previous factor's persistence
interval.  The node ids and quantized levels along that descent are kept
on the point; the matching criteria of the distance need them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .jcn import QuantizationSpec
from .persistence import (EXTENDED0, EXTENDED1, ORDINARY0,
                          PersistenceDiagram, PersistencePoint,
                          compute_reeb_pd, resolve_degeneracies)
from .reeb import MDRG


class MDPDError(ValueError):
    pass


def persistence_interval(x: PersistencePoint) -> tuple[float, float]:
    """Closed interval [min(birth, death), max(birth, death)]."""
    return (min(x.birth, x.death), max(x.birth, x.death))


@dataclass(frozen=True)
class MDPDPoint:
    factors: tuple[PersistencePoint, ...]
    node_path: tuple[int, ...]
    level_path: tuple[int, ...]

    def __post_init__(self):
        if len(self.factors) < 2:
            raise MDPDError("an MDPD point needs at least two factors")
        if len(self.node_path) != len(self.factors) - 1:
            raise MDPDError("node_path must have one entry per descent")
        if len(self.level_path) != len(self.node_path):
            raise MDPDError("level_path and node_path must align")

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(x.dim for x in self.factors)

    def to_dict(self) -> dict:
        return {
            "factors": [[x.birth, x.death] for x in self.factors],
            "dims": list(self.dims),
            "node_path": list(self.node_path),
            "level_path": list(self.level_path),
            "kinds": [x.kind for x in self.factors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MDPDPoint":
        dims = [int(k) for k in d["dims"]]
        kinds = d.get("kinds")
        if kinds is None:
            # without stored kinds, ordinary0 vs extended0 at dim 0 is
            # ambiguous; the guess never matters, matching groups by dim
            kinds = [EXTENDED1 if k == 1 else (EXTENDED0 if b >= de else ORDINARY0)
                     for (b, de), k in zip(d["factors"], dims)]
        factors = tuple(PersistencePoint(float(b), float(de), k, kd)
                        for (b, de), k, kd in zip(d["factors"], dims, kinds))
        return cls(factors, tuple(int(i) for i in d["node_path"]),
                   tuple(int(v) for v in d["level_path"]))


def persistence_measure(pt: MDPDPoint) -> float:
    """Volume of the box spanned by the factor persistence intervals."""
    out = 1.0
    for x in pt.factors:
        lo, hi = persistence_interval(x)
        out *= hi - lo
    return out


@dataclass
class MDPD:
    points: list[MDPDPoint] = field(default_factory=list)
    spec: QuantizationSpec | None = None

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def n(self) -> int | None:
        return self.points[0].n if self.points else None

    def subset(self, node_id: int) -> list[MDPDPoint]:
        """Points whose first descent passes through the given level-1 node."""
        return [p for p in self.points if p.node_path[0] == node_id]

    def group_by_path(self, depth: int) -> dict[int, list[MDPDPoint]]:
        out: dict[int, list[MDPDPoint]] = {}
        for p in self.points:
            out.setdefault(p.node_path[depth], []).append(p)
        return out

    def to_dict(self) -> dict:
        d = {"points": [p.to_dict() for p in self.points]}
        if self.spec is not None:
            d["spec"] = self.spec.to_dict()
        return d

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "MDPD":
        spec = QuantizationSpec.from_dict(d["spec"]) if "spec" in d else None
        return cls([MDPDPoint.from_dict(p) for p in d["points"]], spec)

    @classmethod
    def load(cls, path: str) -> "MDPD":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def compute_mdrg_diagrams(mdrg: MDRG,
                          epsilon: float) -> dict[tuple[int, ...], PersistenceDiagram]:
    """Resolve every Reeb graph in the MDRG and compute its diagram.

    Keys are descent paths as ``construct_mdpd`` expects.  Resolution
    works on a copy; the MDRG keeps its original node values, which the
    interval-membership test in ``construct_mdpd`` relies on.
    """
    out: dict[tuple[int, ...], PersistenceDiagram] = {}
    for path, graph in mdrg.walk():
        resolved = resolve_degeneracies(graph, epsilon)
        out[path] = compute_reeb_pd(resolved, source="/".join(map(str, path)))
    return out


def construct_mdpd(mdrg: MDRG,
                   diagrams: dict[tuple[int, ...], PersistenceDiagram],
                   spec: QuantizationSpec | None = None) -> MDPD:
    """Assemble the MDPD from an MDRG and its per-graph diagrams.

    ``diagrams`` is keyed by the descent path that addresses each Reeb
    graph inside the MDRG: () for the first field's graph, (p,) for the
    child at node p, and so on.  For every diagram point, every node of
    the current graph whose value falls in the point's closed persistence
    interval contributes its child's diagram as the next factor.
    """
    if mdrg.depth < 2:
        raise MDPDError("need at least two fields")
    points: list[MDPDPoint] = []

    def descend(sub: MDRG, path: tuple[int, ...],
                factors: tuple[PersistencePoint, ...],
                levels: tuple[int, ...]) -> None:
        pd = diagrams.get(path)
        if pd is None:
            raise MDPDError(f"missing diagram for graph at path {path}")
        if not sub.children:  # innermost field: each point completes a tuple
            for x in pd:
                points.append(MDPDPoint(factors + (x,), path, levels))
            return
        for x in pd:
            lo, hi = persistence_interval(x)
            for nd in sub.graph.nodes:
                if lo <= nd.value <= hi:
                    descend(sub.children[nd.id], path + (nd.id,),
                            factors + (x,), levels + (nd.level,))

    descend(mdrg, (), (), ())
    return MDPD(points, spec)
