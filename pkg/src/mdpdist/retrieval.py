"""Corpus distance matrices and retrieval scoring.

Every query ranks all other objects by distance, ties broken by object
id, and the five scores are averaged over queries:

* NN: is the top-ranked object in the query's class;
* First Tier: same-class fraction retrieved in the top |C|-1;
* Second Tier: same-class fraction retrieved in the top 2(|C|-1);
* E-measure: harmonic mean of precision and recall in the top K
  (K = 32 by default, capped at the ranking length);
* DCG: G1 + sum_{i>=2} G_i / log2(i) over the full ranking, with G_i = 1
  on same-class hits, divided by the score of the ideal ranking.

Queries whose class has no other member are skipped with a warning.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .distance import mdrg_distance
from .mdpd import MDPD

DEFAULT_E_MEASURE_K = 32


class RetrievalError(ValueError):
    pass


@dataclass
class DistanceMatrix:
    values: np.ndarray
    ids: list[str]
    labels: list[str] | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.ids)
        if self.values.shape != (n, n):
            raise RetrievalError(
                f"matrix shape {self.values.shape} does not match {n} ids")
        if self.values.size:
            if (self.values < 0).any():
                raise RetrievalError("distances must be non-negative")
            if not np.allclose(self.values, self.values.T):
                raise RetrievalError("matrix must be symmetric")
            if not np.allclose(np.diag(self.values), 0):
                raise RetrievalError("diagonal must be zero")
        if self.labels is not None and len(self.labels) != n:
            raise RetrievalError("label count does not match ids")
        if len(set(self.ids)) != n:
            raise RetrievalError("object ids must be unique")

    @property
    def n(self) -> int:
        return len(self.ids)

    def save_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("id," + ",".join(self.ids) + "\n")
            for i, oid in enumerate(self.ids):
                fh.write(oid + "," + ",".join(repr(float(v)) for v in self.values[i]) + "\n")

    @classmethod
    def load_csv(cls, path: str, labels: list[str] | None = None) -> "DistanceMatrix":
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        if not lines or not lines[0].startswith("id,"):
            raise RetrievalError(f"{path}: missing id header row")
        ids = lines[0].split(",")[1:]
        rows = []
        for ln in lines[1:]:
            parts = ln.split(",")
            rows.append([float(x) for x in parts[1:]])
        if len(rows) != len(ids):
            raise RetrievalError(f"{path}: {len(rows)} rows for {len(ids)} ids")
        return cls(np.array(rows), ids, labels)


def _pair_distance(args):
    i, j, a, b, q = args
    return i, j, mdrg_distance(a, b, q).value


def distance_matrix(corpus: list[MDPD], q: float = 2.0,
                    ids: list[str] | None = None,
                    labels: list[str] | None = None,
                    jobs: int = 1) -> DistanceMatrix:
    """All-pairs distances; upper triangle computed, mirrored down."""
    n = len(corpus)
    specs = {m.spec for m in corpus if m.spec is not None}
    if len(specs) > 1:
        raise RetrievalError("corpus mixes quantization specs")
    if ids is None:
        ids = [str(i) for i in range(n)]
    tasks = [(i, j, corpus[i], corpus[j], q)
             for i in range(n) for j in range(i + 1, n)]
    values = np.zeros((n, n))
    if jobs > 1 and tasks:
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            results = pool.map(_pair_distance, tasks)
    else:
        results = [_pair_distance(t) for t in tasks]
    for i, j, d in results:
        values[i, j] = values[j, i] = d
    return DistanceMatrix(values, ids, labels)


@dataclass
class RetrievalScores:
    nn: float
    ft: float
    st: float
    e_measure: float
    dcg: float
    skipped: list[str] = field(default_factory=list)

    def __post_init__(self):
        for name in ("nn", "ft", "st", "e_measure", "dcg"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise RetrievalError(f"{name} = {v} outside [0, 1]")

    def to_dict(self) -> dict:
        return {"nn": self.nn, "ft": self.ft, "st": self.st,
                "e_measure": self.e_measure, "dcg": self.dcg,
                "skipped": list(self.skipped)}


def _ranking(matrix: DistanceMatrix, qi: int) -> list[int]:
    order = [j for j in range(matrix.n) if j != qi]
    order.sort(key=lambda j: (matrix.values[qi, j], matrix.ids[j]))
    return order


def evaluate(matrix: DistanceMatrix, labels: list[str] | None = None,
             e_measure_k: int = DEFAULT_E_MEASURE_K) -> RetrievalScores:
    """Average retrieval scores over all usable queries."""
    if labels is None:
        labels = matrix.labels
    if labels is None:
        raise RetrievalError("no class labels given")
    if len(labels) != matrix.n:
        raise RetrievalError("label count does not match matrix")
    class_size = {c: labels.count(c) for c in set(labels)}
    nn = ft = st = em = dcg = 0.0
    used = 0
    skipped = []
    for qi in range(matrix.n):
        rel = class_size[labels[qi]] - 1
        if rel == 0:
            skipped.append(matrix.ids[qi])
            continue
        order = _ranking(matrix, qi)
        hits = [labels[j] == labels[qi] for j in order]
        nn += 1.0 if hits[0] else 0.0
        ft += sum(hits[:rel]) / rel
        st += sum(hits[:2 * rel]) / rel
        k_eff = min(e_measure_k, len(order))
        got = sum(hits[:k_eff])
        precision = got / k_eff
        recall = got / rel
        em += 0.0 if got == 0 else 2.0 / (1.0 / precision + 1.0 / recall)
        score = (1.0 if hits[0] else 0.0) + sum(
            1.0 / math.log2(i + 1) for i in range(1, len(order)) if hits[i])
        ideal = 1.0 + sum(1.0 / math.log2(i + 1) for i in range(1, rel))
        dcg += score / ideal
        used += 1
    if skipped:
        warnings.warn(f"skipped {len(skipped)} singleton-class queries: {skipped}")
    if used == 0:
        raise RetrievalError("no query has a class of size >= 2")
    return RetrievalScores(nn / used, ft / used, st / used, em / used,
                           dcg / used, skipped)


def save_scores(scores: RetrievalScores, path: str) -> None:
    import json
    with open(path, "w") as fh:
        json.dump(scores.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def save_pgm(matrix: DistanceMatrix, path: str) -> None:
    """Binary 8-bit PGM (P5), row-major, distances min-max scaled to 0..255."""
    vals = matrix.values
    lo, hi = float(vals.min()), float(vals.max())
    scale = (vals - lo) / (hi - lo) if hi > lo else np.zeros_like(vals)
    gray = np.round(scale * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{matrix.n} {matrix.n}\n255\n".encode())
        fh.write(gray.tobytes())


def save_ppm(matrix: DistanceMatrix, path: str) -> None:
    """Binary PPM (P6) with a linear blue-to-red map.

    Scaled distance t in [0, 1] maps to (255 t, 0, 255 (1 - t)): near
    pairs blue, far pairs red.
    """
    vals = matrix.values
    lo, hi = float(vals.min()), float(vals.max())
    t = (vals - lo) / (hi - lo) if hi > lo else np.zeros_like(vals)
    rgb = np.zeros((matrix.n, matrix.n, 3), dtype=np.uint8)
    rgb[:, :, 0] = np.round(t * 255).astype(np.uint8)
    rgb[:, :, 2] = np.round((1 - t) * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{matrix.n} {matrix.n}\n255\n".encode())
        fh.write(rgb.tobytes())
