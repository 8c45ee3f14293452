"""Command-line pipeline driver.

Subcommands cover the whole flow: synthesize shape-descriptor fields,
run one object through quantization / Reeb decomposition / diagram
assembly, compute distances and corpus matrices, score retrieval, and
render heatmaps.  All outputs are deterministic: rerunning a command on
identical inputs reproduces byte-identical files, whatever ``--jobs``.

Exit codes: 0 success, 2 input error (unreadable or inconsistent data),
3 configuration error (bad flags or parameter values).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .distance import DistanceError, mdrg_distance
from .fields import euclidean_field, geodesic_field
from .jcn import JCNError, QuantizationSpec, build_jcn
from .mdpd import (MDPD, MDPDError, compute_mdrg_diagrams, construct_mdpd)
from .mesh import (MeshError, MultiField, SimplicialMesh, load_field_csv,
                   load_grid, load_mesh, save_field_csv)
from .persistence import DegeneracyError, EpsilonError
from .reeb import build_mdrg
from .retrieval import (DEFAULT_E_MEASURE_K, DistanceMatrix, RetrievalError,
                        distance_matrix, evaluate, save_pgm, save_ppm,
                        save_scores)

DESCRIPTORS = ("geodesic", "euclidean")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    levels: list[int]
    order: list[int] | None = None
    ranges: dict[int, tuple[float, float]] = field(default_factory=dict)
    q: float = 2.0
    epsilon: float | None = None  # None: 1e-6 of the narrowest level width
    jobs: int = 1
    out: str = "."

    def __post_init__(self):
        if not self.levels or any(lv < 1 for lv in self.levels):
            raise ConfigError(f"levels must all be >= 1, got {self.levels}")
        if self.q <= 0:
            raise ConfigError(f"q must be positive, got {self.q}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


def _parse_ints(text: str, flag: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag}: expected comma-separated integers, got {text!r}") from exc


def _parse_ranges(tokens: list[str]) -> dict[int, tuple[float, float]]:
    out: dict[int, tuple[float, float]] = {}
    for tok in tokens:
        if tok == "corpus":
            continue  # corpus-wide ranges are the default where applicable
        parts = tok.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--range expects f_i:min:max, got {tok!r}")
        idx_text = parts[0][1:] if parts[0][:1] == "f" else parts[0]
        try:
            idx = int(idx_text)
            lo, hi = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ConfigError(f"--range expects f_i:min:max, got {tok!r}") from exc
        if hi <= lo:
            raise ConfigError(f"--range {tok!r}: max must exceed min")
        out[idx] = (lo, hi)
    return out


def _sniff_kind(path: str) -> str:
    with open(path) as fh:
        head = fh.read(64).split()
    if head and head[0].upper() == "GRID":
        return "grid"
    return "mesh"


def _load_object(path: str, field_tokens: list[str],
                 order: list[int] | None) -> MultiField:
    if _sniff_kind(path) == "grid":
        mf = load_grid(path)
    else:
        mesh = load_mesh(path)
        if not field_tokens:
            raise ConfigError(
                "mesh input needs --fields (descriptor names or CSV paths)")
        fields = []
        for tok in field_tokens:
            if tok == "geodesic":
                fields.append(geodesic_field(mesh))
            elif tok == "euclidean":
                fields.append(euclidean_field(mesh))
            else:
                fields.append(load_field_csv(tok, mesh.vertex_count))
        mf = MultiField(mesh, fields)
    if order is not None:
        mf = mf.reordered(order)
    return mf


def _make_spec(mf: MultiField, cfg: PipelineConfig,
               corpus_ranges: dict[int, tuple[float, float]] | None = None) -> QuantizationSpec:
    if len(cfg.levels) != mf.n:
        raise ConfigError(
            f"--levels gives {len(cfg.levels)} entries for {mf.n} fields")
    ranges = []
    for i in range(mf.n):
        if i in cfg.ranges:
            ranges.append(cfg.ranges[i])
        elif corpus_ranges is not None and i in corpus_ranges:
            ranges.append(corpus_ranges[i])
        else:
            vals = mf.fields[i].values
            lo, hi = float(vals.min()), float(vals.max())
            if hi <= lo:
                raise MeshError(
                    f"field {mf.fields[i].name!r} is constant; give --range")
            ranges.append((lo, hi))
    return QuantizationSpec.uniform(ranges, cfg.levels)


def _effective_epsilon(spec: QuantizationSpec, cfg: PipelineConfig) -> float:
    if cfg.epsilon is not None:
        return cfg.epsilon
    # tiny vs the level width so long tie-break chains never cross a level
    return min(fs.width for fs in spec.fields) * 1e-6


def _build_mdpd(mf: MultiField, spec: QuantizationSpec, epsilon: float) -> MDPD:
    jcn = build_jcn(mf, spec)
    mdrg = build_mdrg(jcn)
    diagrams = compute_mdrg_diagrams(mdrg, epsilon)
    return construct_mdpd(mdrg, diagrams, spec)


# ---------------------------------------------------------------- subcommands

def cmd_fields(args) -> int:
    mesh = load_mesh(args.mesh)
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.mesh))[0]
    wanted = DESCRIPTORS if args.which == "both" else (args.which,)
    for name in wanted:
        f = geodesic_field(mesh) if name == "geodesic" else euclidean_field(mesh)
        path = os.path.join(args.out, f"{stem}_{name}.csv")
        save_field_csv(path, f)
        print(path)
    return 0


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig(levels=_parse_ints(args.levels, "--levels"),
                         order=_parse_ints(args.order, "--order") if args.order else None,
                         ranges=_parse_ranges(args.range),
                         q=args.q, epsilon=args.epsilon, out=args.out)
    mf = _load_object(args.input, args.fields.split(",") if args.fields else [],
                      cfg.order)
    spec = _make_spec(mf, cfg)
    epsilon = _effective_epsilon(spec, cfg)
    os.makedirs(cfg.out, exist_ok=True)
    jcn = build_jcn(mf, spec)
    jcn.save(os.path.join(cfg.out, "jcn.json"), with_members=args.members)
    mdrg = build_mdrg(jcn)
    mdrg.save(os.path.join(cfg.out, "mdrg.json"))
    diagrams = compute_mdrg_diagrams(mdrg, epsilon)
    mdpd = construct_mdpd(mdrg, diagrams, spec)
    mdpd.save(os.path.join(cfg.out, "mdpd.json"))
    print(os.path.join(cfg.out, "mdpd.json"))
    return 0


def cmd_dist(args) -> int:
    a, b = MDPD.load(args.a), MDPD.load(args.b)
    result = mdrg_distance(a, b, args.q, with_transcript=bool(args.transcript))
    if args.transcript:
        with open(args.transcript, "w") as fh:
            json.dump({"value": result.value, "q": result.q,
                       "matching": result.transcript}, fh, indent=1, sort_keys=True)
            fh.write("\n")
    print(result.value)
    return 0


def _read_manifest(path: str) -> list[tuple[str, str, str]]:
    rows = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise MeshError(f"{path}:{lineno}: expected 'id, path, label'")
            oid, rel, label = parts
            rows.append((oid, os.path.join(base, rel), label))
    ids = [r[0] for r in rows]
    if len(set(ids)) != len(ids):
        raise MeshError(f"{path}: duplicate object ids")
    if not rows:
        raise MeshError(f"{path}: empty manifest")
    return rows


def _load_task(task):
    path, tokens, order = task
    return _load_object(path, tokens, order)


def _mdpd_task(task):
    mf, spec, epsilon = task
    return _build_mdpd(mf, spec, epsilon)


def cmd_matrix(args) -> int:
    cfg = PipelineConfig(levels=_parse_ints(args.levels, "--levels"),
                         order=_parse_ints(args.order, "--order") if args.order else None,
                         ranges=_parse_ranges(args.range),
                         q=args.q, epsilon=args.epsilon, jobs=args.jobs,
                         out=args.out)
    rows = _read_manifest(args.manifest)
    tokens = args.fields.split(",") if args.fields else []
    load_tasks = [(path, tokens, cfg.order) for _, path, _ in rows]
    if cfg.jobs > 1:
        from multiprocessing import Pool
        with Pool(cfg.jobs) as pool:
            mfs = pool.map(_load_task, load_tasks)
    else:
        mfs = [_load_task(t) for t in load_tasks]
    n_fields = {mf.n for mf in mfs}
    if len(n_fields) != 1:
        raise MeshError(f"objects disagree on field count: {sorted(n_fields)}")
    corpus_ranges = {}
    for i in range(mfs[0].n):
        if i in cfg.ranges:
            continue
        lo = min(float(mf.fields[i].values.min()) for mf in mfs)
        hi = max(float(mf.fields[i].values.max()) for mf in mfs)
        if hi <= lo:
            raise MeshError(f"field {i} is constant across the corpus; give --range")
        corpus_ranges[i] = (lo, hi)
    spec = _make_spec(mfs[0], cfg, corpus_ranges)
    epsilon = _effective_epsilon(spec, cfg)
    build_tasks = [(mf, spec, epsilon) for mf in mfs]
    if cfg.jobs > 1:
        from multiprocessing import Pool
        with Pool(cfg.jobs) as pool:
            corpus = pool.map(_mdpd_task, build_tasks)
    else:
        corpus = [_mdpd_task(t) for t in build_tasks]
    matrix = distance_matrix(corpus, cfg.q,
                             ids=[oid for oid, _, _ in rows],
                             labels=[label for _, _, label in rows],
                             jobs=cfg.jobs)
    os.makedirs(cfg.out, exist_ok=True)
    out_path = os.path.join(cfg.out, "matrix.csv")
    matrix.save_csv(out_path)
    print(out_path)
    return 0


def cmd_eval(args) -> int:
    rows = _read_manifest(args.manifest)
    labels = {oid: label for oid, _, label in rows}
    matrix = DistanceMatrix.load_csv(args.matrix)
    missing = [oid for oid in matrix.ids if oid not in labels]
    if missing:
        raise MeshError(f"manifest lacks labels for: {missing}")
    scores = evaluate(matrix, [labels[oid] for oid in matrix.ids],
                      e_measure_k=args.k)
    if args.out:
        save_scores(scores, args.out)
    print(json.dumps(scores.to_dict(), indent=1, sort_keys=True))
    return 0


def cmd_heatmap(args) -> int:
    matrix = DistanceMatrix.load_csv(args.matrix)
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.matrix))[0]
    pgm = os.path.join(args.out, f"{stem}.pgm")
    save_pgm(matrix, pgm)
    written = [pgm]
    if args.ppm:
        ppm = os.path.join(args.out, f"{stem}.ppm")
        save_ppm(matrix, ppm)
        written.append(ppm)
    from .figures import heatmap_png
    png = os.path.join(args.out, f"{stem}.png")
    heatmap_png(matrix, png, title=stem)
    written.append(png)
    for path in written:
        print(path)
    return 0


def cmd_average(args) -> int:
    matrices = [DistanceMatrix.load_csv(p) for p in args.matrices]
    ids = matrices[0].ids
    for m in matrices[1:]:
        if m.ids != ids:
            raise MeshError("matrices list different object ids")
    mean = np.mean([m.values for m in matrices], axis=0)
    DistanceMatrix(mean, ids).save_csv(args.out)
    print(args.out)
    return 0


# -------------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage errors to exit code 3
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mdpdist",
                     description="Topological multi-field comparison pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fields", help="synthesize descriptor fields from a mesh")
    p.add_argument("mesh")
    p.add_argument("--which", choices=("geodesic", "euclidean", "both"), default="both")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_fields)

    p = sub.add_parser("pipeline", help="mesh/grid -> jcn.json, mdrg.json, mdpd.json")
    p.add_argument("input")
    p.add_argument("--fields", default="",
                   help="comma list: geodesic, euclidean, or CSV paths (mesh input)")
    p.add_argument("--order", default="", help="field order permutation, e.g. 1,0")
    p.add_argument("--levels", required=True, help="levels per field, e.g. 16,16")
    p.add_argument("--range", action="append", default=[],
                   help="f_i:min:max (repeatable); default: the field's own range")
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--members", action="store_true",
                   help="include member vertex lists in jcn.json")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("dist", help="distance between two mdpd.json files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--transcript", default="", help="write matching transcript JSON here")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("matrix", help="corpus manifest -> matrix.csv")
    p.add_argument("manifest", help="text lines: id, path, label")
    p.add_argument("--fields", default="",
                   help="comma list of descriptors for mesh objects")
    p.add_argument("--order", default="")
    p.add_argument("--levels", required=True)
    p.add_argument("--range", action="append", default=[],
                   help="f_i:min:max (repeatable); default: corpus-wide range")
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("eval", help="matrix.csv + manifest -> retrieval scores")
    p.add_argument("matrix")
    p.add_argument("manifest")
    p.add_argument("--k", type=int, default=DEFAULT_E_MEASURE_K,
                   help="E-measure depth")
    p.add_argument("--out", default="", help="also write scores JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("heatmap", help="matrix.csv -> PGM (+PPM) + PNG")
    p.add_argument("matrix")
    p.add_argument("--ppm", action="store_true", help="also write a color PPM")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("average", help="elementwise mean of distance matrices")
    p.add_argument("matrices", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_average)

    return parser


_INPUT_ERRORS = (MeshError, JCNError, DegeneracyError, MDPDError,
                 DistanceError, RetrievalError, OSError,
                 json.JSONDecodeError, KeyError)
_CONFIG_ERRORS = (ConfigError, EpsilonError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
