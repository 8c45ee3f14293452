"""Topological comparison of multi-field data.

Meshes or grids carrying several scalar fields are quantized into a
joint contour net, decomposed field by field into a multi-dimensional
Reeb graph, summarized as a multi-dimensional persistence diagram, and
compared with a constrained Wasserstein distance suitable for shape
retrieval.
"""
from .assignment import CostMatrix, hungarian
from .distance import (DiagonalSet, DistanceError, DistanceResult,
                       diagonal_cost, inner_distance, mdrg_distance,
                       reeb_wasserstein)
from .fields import euclidean_field, geodesic_field, normalize_unit
from .jcn import (FieldSpec, JCNError, JointContourNet, QuantizationSpec,
                  build_jcn, quantize)
from .mdpd import (MDPD, MDPDError, MDPDPoint, compute_mdrg_diagrams,
                   construct_mdpd, persistence_interval, persistence_measure)
from .mesh import (MeshError, MultiField, RegularGrid, SimplicialMesh,
                   VertexField, load_field_csv, load_grid, load_mesh,
                   save_field_csv, save_grid, save_mesh)
from .persistence import (DegeneracyError, EpsilonError, PersistenceDiagram,
                          PersistencePoint, compute_reeb_pd,
                          resolve_degeneracies)
from .reeb import MDRG, ReebGraph, ReebNode, build_mdrg, extract_reeb
from .retrieval import (DistanceMatrix, RetrievalError, RetrievalScores,
                        distance_matrix, evaluate)

__version__ = "0.1.0"

__all__ = [
    "CostMatrix", "hungarian",
    "DiagonalSet", "DistanceError", "DistanceResult", "diagonal_cost",
    "inner_distance", "mdrg_distance", "reeb_wasserstein",
    "euclidean_field", "geodesic_field", "normalize_unit",
    "FieldSpec", "JCNError", "JointContourNet", "QuantizationSpec",
    "build_jcn", "quantize",
    "MDPD", "MDPDError", "MDPDPoint", "compute_mdrg_diagrams",
    "construct_mdpd", "persistence_interval", "persistence_measure",
    "MeshError", "MultiField", "RegularGrid", "SimplicialMesh",
    "VertexField", "load_field_csv", "load_grid", "load_mesh",
    "save_field_csv", "save_grid", "save_mesh",
    "DegeneracyError", "EpsilonError", "PersistenceDiagram",
    "PersistencePoint", "compute_reeb_pd", "resolve_degeneracies",
    "MDRG", "ReebGraph", "ReebNode", "build_mdrg", "extract_reeb",
    "DistanceMatrix", "RetrievalError", "RetrievalScores",
    "distance_matrix", "evaluate",
    "__version__",
]
