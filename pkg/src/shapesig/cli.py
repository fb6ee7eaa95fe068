"""Command-line interface: compute, dist, embed, validate.

Exit codes: 0 success, 1 partial failure (some corpus meshes excluded),
2 fatal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .mesh import parse_obj, parse_off, validate
from .persistence import diagram_to_json
from .pipeline import (
    DescriptorConfig,
    DistanceMatrix,
    compute_descriptor,
    corpus_matrix,
    mds_embed,
)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2


def _parse_indices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eigenfunction list {text!r} (expected e.g. 1,2,3)")


def _add_descriptor_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--laplacian", choices=["graph", "cotangent"], default="cotangent",
                        help="Laplacian discretization (default: cotangent)")
    parser.add_argument("--eigs", type=_parse_indices, default=(1,), metavar="1,2,3",
                        help="eigenfunction indices, 1 = Fiedler vector (default: 1)")
    parser.add_argument("--tol", type=float, default=1e-8,
                        help="eigensolver residual tolerance (default: 1e-8)")
    parser.add_argument("--merge-epsilon", type=float, default=None, metavar="EPS",
                        help="merge vertices closer than EPS before validation")
    parser.add_argument("--allow-multicomponent", action="store_true",
                        help="use the largest component of a disconnected mesh")


def _config_from_args(args) -> DescriptorConfig:
    return DescriptorConfig(
        laplacian_variant=args.laplacian,
        eigenfunction_indices=args.eigs,
        eigensolver_tol=args.tol,
        metric=getattr(args, "metric", "bottleneck"),
        wasserstein_q=getattr(args, "q", 2.0),
        aggregation=getattr(args, "agg", "sum"),
        merge_epsilon=args.merge_epsilon,
        allow_multicomponent=args.allow_multicomponent,
    )


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_compute(args) -> int:
    config = _config_from_args(args)
    descriptor = compute_descriptor(args.mesh, config)
    if len(config.eigenfunction_indices) == 1:
        only = config.eigenfunction_indices[0]
        text = diagram_to_json(descriptor.diagrams[only])
    else:
        text = json.dumps(descriptor.to_dict(), indent=2) + "\n"
    _write_or_print(text, args.out)
    return EXIT_OK


def _cmd_dist(args) -> int:
    config = _config_from_args(args)
    matrix = corpus_matrix(
        args.directory,
        config,
        threads=args.threads,
        use_cache=not args.no_cache,
        cache_dir=args.cache_dir,
    )
    _write_or_print(matrix.to_csv(), args.out)
    if matrix.failures:
        for mesh_id, reason in matrix.failures:
            print(f"excluded {mesh_id}: {reason}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_embed(args) -> int:
    matrix = DistanceMatrix.from_csv(Path(args.matrix).read_text())
    embedding = mds_embed(matrix, dim=args.dim)
    _write_or_print(embedding.to_csv(), args.out)
    print(f"stress: {embedding.stress!r}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    path = Path(args.mesh)
    text = path.read_text()
    mesh = parse_obj(text) if path.suffix.lower() == ".obj" else parse_off(text)
    report = validate(mesh)
    print(f"vertices: {mesh.vertex_count}")
    print(f"triangles: {mesh.triangle_count}")
    print(f"edges: {len(mesh.edges)}")
    print(f"is_manifold: {report.is_manifold}")
    print(f"component_count: {report.component_count}")
    print(f"boundary_edge_count: {report.boundary_edge_count}")
    print(f"non_manifold_edge_count: {report.non_manifold_edge_count}")
    print(f"duplicate_vertex_warnings: {report.duplicate_vertex_warnings}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapesig",
        description="Topological shape signatures from Laplacian eigenfunctions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="descriptor diagrams for one mesh")
    p_compute.add_argument("mesh", help="mesh file (.off or .obj)")
    _add_descriptor_options(p_compute)
    p_compute.add_argument("--out", default=None, help="output diagram file (default: stdout)")
    p_compute.set_defaults(func=_cmd_compute)

    p_dist = sub.add_parser("dist", help="pairwise distance matrix over a mesh directory")
    p_dist.add_argument("directory", help="directory of .off/.obj files")
    _add_descriptor_options(p_dist)
    p_dist.add_argument("--metric", choices=["bottleneck", "wasserstein"], default="bottleneck")
    p_dist.add_argument("--q", type=float, default=2.0, help="Wasserstein order (default: 2)")
    p_dist.add_argument("--agg", choices=["sum", "max"], default="sum",
                        help="aggregation across eigenfunctions (default: sum)")
    p_dist.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $SHAPESIG_THREADS or 1)")
    p_dist.add_argument("--no-cache", action="store_true", help="skip the descriptor cache")
    p_dist.add_argument("--cache-dir", default=None, help="descriptor cache directory")
    p_dist.add_argument("--out", default=None, help="output matrix CSV (default: stdout)")
    p_dist.set_defaults(func=_cmd_dist)

    p_embed = sub.add_parser("embed", help="classical MDS embedding of a matrix CSV")
    p_embed.add_argument("matrix", help="distance matrix CSV from 'dist'")
    p_embed.add_argument("--dim", type=int, default=2, help="embedding dimension (default: 2)")
    p_embed.add_argument("--out", default=None, help="output coordinates CSV (default: stdout)")
    p_embed.set_defaults(func=_cmd_embed)

    p_validate = sub.add_parser("validate", help="combinatorial health report for one mesh")
    p_validate.add_argument("mesh", help="mesh file (.off or .obj)")
    p_validate.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
