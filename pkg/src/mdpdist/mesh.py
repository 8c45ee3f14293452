"""Carriers for multi-field data: triangle meshes and regular grids.

A carrier provides vertices plus an edge graph; scalar fields are stored
per vertex and grouped into an ordered :class:`MultiField`.  The field
order matters downstream (it fixes which field drives the first Reeb
graph), so it is preserved exactly as given.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


class MeshError(ValueError):
    """Raised for malformed carrier or field input."""


class SimplicialMesh:
    """A triangle mesh with a derived edge graph.

    Parameters
    ----------
    vertices : (V, 3) array_like
        Vertex coordinates.
    triangles : (T, 3) array_like
        Vertex indices, one row per triangle.  Extra lower-dimensional
        simplices (bare edges) may be passed via ``edges``; they join the
        derived edge graph but carry no area.
    edges : (E, 2) array_like, optional
        Explicit edges in addition to triangle edges.
    """

    def __init__(self, vertices, triangles, edges=None):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(triangles, dtype=int).reshape(-1, 3)
        nv = len(self.vertices)
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= nv):
            raise MeshError("triangle index out of range")
        pairs = set()
        for tri in self.triangles:
            a, b, c = (int(x) for x in tri)
            if a == b or b == c or a == c:
                raise MeshError("degenerate triangle with repeated vertex")
            pairs.add((min(a, b), max(a, b)))
            pairs.add((min(b, c), max(b, c)))
            pairs.add((min(a, c), max(a, c)))
        if edges is not None:
            for e in np.asarray(edges, dtype=int).reshape(-1, 2):
                a, b = int(e[0]), int(e[1])
                if a == b:
                    raise MeshError("self-loop edge")
                if not (0 <= a < nv and 0 <= b < nv):
                    raise MeshError("edge index out of range")
                pairs.add((min(a, b), max(a, b)))
        self.edges = np.array(sorted(pairs), dtype=int).reshape(-1, 2)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def edge_lengths(self) -> np.ndarray:
        d = self.vertices[self.edges[:, 0]] - self.vertices[self.edges[:, 1]]
        return np.linalg.norm(d, axis=1)

    def vertex_areas(self) -> np.ndarray:
        """One third of the summed area of the triangles incident to each vertex."""
        areas = np.zeros(self.vertex_count)
        if len(self.triangles) == 0:
            return areas
        p0 = self.vertices[self.triangles[:, 0]]
        p1 = self.vertices[self.triangles[:, 1]]
        p2 = self.vertices[self.triangles[:, 2]]
        tri_area = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
        for k in range(3):
            np.add.at(areas, self.triangles[:, k], tri_area / 3.0)
        return areas


class RegularGrid:
    """Axis-aligned grid of ``nx * ny * nz`` vertices with unit spacing.

    Vertex ids run x-fastest: ``id = x + nx * (y + ny * z)``.  Adjacency is
    the 6-neighborhood (shared voxel faces), collapsing to 4- and
    2-neighborhoods for flat and linear grids.
    """

    def __init__(self, nx: int, ny: int, nz: int):
        if nx < 1 or ny < 1 or nz < 1:
            raise MeshError("grid dims must be >= 1")
        self.dims = (int(nx), int(ny), int(nz))

    @property
    def vertex_count(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    def vertex_id(self, x: int, y: int, z: int) -> int:
        nx, ny, _ = self.dims
        return x + nx * (y + ny * z)

    @property
    def edges(self) -> np.ndarray:
        nx, ny, nz = self.dims
        ids = np.arange(nx * ny * nz).reshape(nz, ny, nx)
        out = []
        if nx > 1:
            out.append(np.stack([ids[:, :, :-1].ravel(), ids[:, :, 1:].ravel()], axis=1))
        if ny > 1:
            out.append(np.stack([ids[:, :-1, :].ravel(), ids[:, 1:, :].ravel()], axis=1))
        if nz > 1:
            out.append(np.stack([ids[:-1, :, :].ravel(), ids[1:, :, :].ravel()], axis=1))
        if not out:
            return np.zeros((0, 2), dtype=int)
        e = np.concatenate(out, axis=0)
        e.sort(axis=1)
        order = np.lexsort((e[:, 1], e[:, 0]))
        return e[order]


@dataclass
class VertexField:
    """One real value per carrier vertex."""

    values: np.ndarray
    name: str = "field"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(self.values)):
            raise MeshError(f"field {self.name!r} has non-finite values")


@dataclass
class MultiField:
    """A carrier plus an ordered list of per-vertex scalar fields."""

    carrier: SimplicialMesh | RegularGrid
    fields: list[VertexField] = field(default_factory=list)

    def __post_init__(self):
        if len(self.fields) < 1:
            raise MeshError("MultiField needs at least one field")
        nv = self.carrier.vertex_count
        for f in self.fields:
            if len(f.values) != nv:
                raise MeshError(
                    f"field {f.name!r} has {len(f.values)} values for {nv} vertices"
                )

    @property
    def n(self) -> int:
        return len(self.fields)

    def reordered(self, order: list[int]) -> "MultiField":
        if sorted(order) != list(range(self.n)):
            raise MeshError(f"order {order} is not a permutation of 0..{self.n - 1}")
        return MultiField(self.carrier, [self.fields[i] for i in order])


def load_mesh(path: str, fmt: str = "OFF") -> SimplicialMesh:
    """Parse an ASCII OFF file with triangular faces."""
    if fmt.upper() != "OFF":
        raise MeshError(f"unsupported mesh format {fmt!r}")
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    if not tokens:
        raise MeshError(f"{path}: empty OFF file")
    pos = 0
    if tokens[0].upper() == "OFF":
        pos = 1
    try:
        nv, nf, _ne = int(tokens[pos]), int(tokens[pos + 1]), int(tokens[pos + 2])
        pos += 3
        verts = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
        pos += 3 * nv
        faces = []
        for _ in range(nf):
            k = int(tokens[pos])
            if k != 3:
                raise MeshError(f"{path}: non-triangular face with {k} vertices")
            faces.append([int(t) for t in tokens[pos + 1:pos + 4]])
            pos += 1 + k
    except (IndexError, ValueError) as exc:
        if isinstance(exc, MeshError):
            raise
        raise MeshError(f"{path}: OFF parse failure: {exc}") from exc
    if nf == 0:
        raise MeshError(f"{path}: no simplices")
    return SimplicialMesh(verts, faces)


def save_mesh(path: str, mesh: SimplicialMesh) -> None:
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.vertex_count} {len(mesh.triangles)} 0\n")
        for v in mesh.vertices:
            fh.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for t in mesh.triangles:
            fh.write(f"3 {int(t[0])} {int(t[1])} {int(t[2])}\n")


def load_grid(path: str) -> MultiField:
    """Read the ``GRID nx ny nz nfields`` text format (values field-major)."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 5 or tokens[0].upper() != "GRID":
        raise MeshError(f"{path}: expected 'GRID nx ny nz nfields' header")
    try:
        nx, ny, nz, nfields = (int(t) for t in tokens[1:5])
    except ValueError as exc:
        raise MeshError(f"{path}: bad GRID header: {exc}") from exc
    grid = RegularGrid(nx, ny, nz)
    nv = grid.vertex_count
    vals = tokens[5:]
    if len(vals) != nv * nfields:
        raise MeshError(
            f"{path}: header promises {nv * nfields} values "
            f"({nv} vertices x {nfields} fields), found {len(vals)}"
        )
    data = np.array(vals, dtype=float).reshape(nfields, nv)
    fields = [VertexField(data[i], name=f"f{i}") for i in range(nfields)]
    return MultiField(grid, fields)


def save_grid(path: str, mf: MultiField) -> None:
    if not isinstance(mf.carrier, RegularGrid):
        raise MeshError("save_grid needs a RegularGrid carrier")
    nx, ny, nz = mf.carrier.dims
    with open(path, "w") as fh:
        fh.write(f"GRID {nx} {ny} {nz} {mf.n}\n")
        for f in mf.fields:
            fh.write(" ".join(repr(float(v)) for v in f.values))
            fh.write("\n")


def load_field_csv(path: str, vertex_count: int | None = None) -> VertexField:
    """Read per-vertex values from ``vertex_id,value`` lines."""
    pairs = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise MeshError(f"{path}:{ln}: expected 'vertex_id,value'")
            try:
                vid = int(parts[0])
            except ValueError:
                if ln == 1:
                    continue  # header row
                raise MeshError(f"{path}:{ln}: bad vertex id {parts[0]!r}")
            if vid in pairs:
                raise MeshError(f"{path}:{ln}: duplicate vertex id {vid}")
            pairs[vid] = float(parts[1])
    n = vertex_count if vertex_count is not None else (max(pairs) + 1 if pairs else 0)
    if sorted(pairs) != list(range(n)):
        raise MeshError(f"{path}: vertex ids do not cover 0..{n - 1}")
    values = np.array([pairs[i] for i in range(n)])
    return VertexField(values, name=os.path.splitext(os.path.basename(path))[0])


def save_field_csv(path: str, f: VertexField) -> None:
    with open(path, "w") as fh:
        fh.write("vertex_id,value\n")
        for i, v in enumerate(f.values):
            fh.write(f"{i},{float(v)!r}\n")
