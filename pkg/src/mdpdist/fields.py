"""Shape-descriptor scalar fields synthesized from mesh geometry.

Two descriptors are provided, both area-weighted sums over every vertex
of the mesh and min-max normalized to [0, 1]:

* ``geodesic_field``: mu(v) = sum_u g(v, u) * w(u), with g the
  shortest-path distance on the edge graph under Euclidean edge weights.
* ``euclidean_field``: d2(v) = sum_u ||v - u||_2 * w(u).

The weight w(u) is one third of the total area of the triangles incident
to u, an even spread of each triangle's area onto its corners.  Both
descriptors depend only on pairwise distances, hence are invariant under
rigid motions of the vertex coordinates.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .mesh import MeshError, SimplicialMesh, VertexField


def normalize_unit(values: np.ndarray) -> np.ndarray:
    """Min-max rescale into [0, 1]; a constant input maps to all zeros."""
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def base_weights(mesh: SimplicialMesh) -> np.ndarray:
    """Area weights for the descriptor sums.

    One third of incident triangle area per vertex; a mesh with no area at
    all (edge-only carriers, fully degenerate triangles) falls back to
    uniform unit weights so the descriptors stay informative.
    """
    w = mesh.vertex_areas()
    if w.sum() == 0.0:
        return np.ones(mesh.vertex_count)
    return w


def _edge_graph(mesh: SimplicialMesh):
    n = mesh.vertex_count
    e = mesh.edges
    w = mesh.edge_lengths()
    if np.any(w == 0.0):
        raise MeshError("zero-length edge; coincident vertices")
    return coo_matrix((np.concatenate([w, w]),
                       (np.concatenate([e[:, 0], e[:, 1]]),
                        np.concatenate([e[:, 1], e[:, 0]]))),
                      shape=(n, n)).tocsr()


def geodesic_field(mesh: SimplicialMesh) -> VertexField:
    """Normalized total geodesic distance descriptor.

    Raises
    ------
    MeshError
        If some vertex is unreachable (disconnected edge graph).
    """
    graph = _edge_graph(mesh)
    dist = dijkstra(graph, directed=False)
    if not np.all(np.isfinite(dist)):
        raise MeshError("mesh edge graph is disconnected")
    raw = dist @ base_weights(mesh)
    return VertexField(normalize_unit(raw), name="geodesic")


def euclidean_field(mesh: SimplicialMesh) -> VertexField:
    """Normalized total Euclidean distance descriptor."""
    if mesh.vertex_count < 2:
        raise MeshError("euclidean_field needs at least 2 vertices")
    v = mesh.vertices
    # pairwise distances in blocks to keep memory flat on big meshes
    w = base_weights(mesh)
    raw = np.empty(len(v))
    block = 512
    for start in range(0, len(v), block):
        chunk = v[start:start + block]
        d = np.linalg.norm(chunk[:, None, :] - v[None, :, :], axis=2)
        raw[start:start + block] = d @ w
    return VertexField(normalize_unit(raw), name="euclidean")
