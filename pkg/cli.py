"""Command-line interface for the normal surface toolkit.

Exit status: 0 success or pass, 1 verification failure, 2 input error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from config import get_settings
from services.verification_service import VerificationService
from topology.enumerator import EnumerationQuery, enumerate_admissible
from topology.errors import TopologyError
from topology.normal_coords import (
    components,
    parse_normal_vector,
    serialize_normal_vector,
    serialize_vector_blocks,
    weight,
)
from topology.prism_builder import (
    build_prism,
    count_cyclic,
    orient_acyclic,
    parse_surface,
    serialize_surface,
)
from topology.refinement import (
    RefinementMap,
    classify_pullback,
    parse_scaling,
    push_forward,
    refine_scaled,
    serialize_scaling,
)
from topology.tri_core import (
    Triangulation,
    compute_skeleton,
    cone_boundary,
    parse_triangulation,
    serialize_triangulation,
    validate,
)

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

MAP_SOURCE = "source.tri"
MAP_SCALE = "scale.txt"


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _triangulation(path: str, check: bool = True) -> Triangulation:
    return parse_triangulation(_read(path), check)


def _load_map(directory: str) -> RefinementMap:
    """Rebuild a refinement map from the source triangulation and scale stored by `refine --map-out`."""
    source = _triangulation(str(Path(directory) / MAP_SOURCE))
    scale = parse_scaling(_read(str(Path(directory) / MAP_SCALE)), source.tet_count)
    _, m = refine_scaled(source, scale)
    return m


def cmd_validate(args) -> int:
    issues = validate(_triangulation(args.triangulation, check=False))
    for issue in issues:
        print(issue)
    if not issues:
        print("valid")
    return EXIT_OK if not issues else EXIT_INPUT


def cmd_skeleton(args) -> int:
    s = compute_skeleton(_triangulation(args.triangulation))
    v, e, f, t = s.counts
    print(f"V={v} E={e} F={f} T={t}")
    return EXIT_OK


def cmd_refine(args) -> int:
    t = _triangulation(args.triangulation)
    if args.scale is not None:
        scale = parse_scaling(_read(args.scale), t.tet_count)
    else:
        scale = (args.uniform,) * t.tet_count
    target, _ = refine_scaled(t, scale)
    if args.map_out:
        out = Path(args.map_out)
        out.mkdir(parents=True, exist_ok=True)
        (out / MAP_SOURCE).write_text(serialize_triangulation(t), encoding="utf-8")
        (out / MAP_SCALE).write_text(serialize_scaling(scale), encoding="utf-8")
        logger.info("Wrote refinement map to %s", out)
    sys.stdout.write(serialize_triangulation(target))
    return EXIT_OK


def cmd_cone(args) -> int:
    coned = cone_boundary(_triangulation(args.triangulation), args.component)
    sys.stdout.write(serialize_triangulation(coned))
    return EXIT_OK


def cmd_orient(args) -> int:
    s = parse_surface(_read(args.surface))
    logger.info("Input has %d cyclic triangles", count_cyclic(s))
    sys.stdout.write(serialize_surface(orient_acyclic(s)))
    return EXIT_OK


def cmd_prism(args) -> int:
    p = build_prism(parse_surface(_read(args.surface)))
    sys.stdout.write(serialize_triangulation(p.triangulation))
    if args.canonical_out:
        Path(args.canonical_out).write_text(serialize_normal_vector(p.canonical), encoding="utf-8")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    settings = get_settings()
    t = _triangulation(args.triangulation)
    support = None
    if args.support:
        support = frozenset(int(token) for token in _read(args.support).split())
    query = EnumerationQuery(t, args.max_w1, support, args.closed)
    vectors = enumerate_admissible(query, settings.max_results, settings.workers)
    sys.stdout.write(serialize_vector_blocks(vectors))
    return EXIT_OK


def cmd_push(args) -> int:
    m = _load_map(args.map)
    v = parse_normal_vector(_read(args.vector), m.source.tet_count)
    sys.stdout.write(serialize_normal_vector(push_forward(m, v)))
    return EXIT_OK


def cmd_classify(args) -> int:
    m = _load_map(args.map)
    back = classify_pullback(m, parse_normal_vector(_read(args.vector), m.target.tet_count))
    sys.stdout.write(serialize_normal_vector(back.source_vector))
    print("spheres " + " ".join(str(c) for c in back.sphere_counts))
    return EXIT_OK


def cmd_weight(args) -> int:
    t = _triangulation(args.triangulation)
    area = weight(t, parse_normal_vector(_read(args.vector), t.tet_count))
    print(f"w1={area.w1} w2={area.w2}")
    return EXIT_OK


def cmd_components(args) -> int:
    t = _triangulation(args.triangulation)
    parts = components(t, parse_normal_vector(_read(args.vector), t.tet_count))
    print(f"count {len(parts)}")
    for part in parts:
        print(f"chi {part.euler_characteristic}")
        sys.stdout.write(serialize_normal_vector(part.vector))
    return EXIT_OK


def _service() -> VerificationService:
    settings = get_settings()
    return VerificationService(settings.max_results, settings.workers)


def _emit(report, args) -> int:
    sys.stdout.write(report.render(include_timing=not args.no_timing))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_verify_theorem1(args) -> int:
    t = _triangulation(args.triangulation)
    scale = parse_scaling(_read(args.scale), t.tet_count)
    return _emit(_service().verify_theorem1(t, scale, args.max_w1), args)


def cmd_verify_weights(args) -> int:
    return _emit(_service().verify_lemma_weights(args.depth), args)


def cmd_verify_prism(args) -> int:
    s = parse_surface(_read(args.surface))
    return _emit(_service().verify_prism(s, args.max_w1), args)


def cmd_verify_outside(args) -> int:
    p = build_prism(orient_acyclic(parse_surface(_read(args.surface))))
    return _emit(_service().verify_outside(p, args.scale, args.max_w1, args.exterior_only), args)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="normalsurf", description=__doc__.splitlines()[0])
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a triangulation file")
    p.add_argument("triangulation")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("skeleton", help="print V, E, F, T")
    p.add_argument("triangulation")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("refine", help="scaled refinement")
    p.add_argument("triangulation")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--scale", help="scaling file, one integer per tet")
    group.add_argument("--uniform", type=int, help="refine every tet N times")
    p.add_argument("--map-out", help="directory to store the map for push/classify")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("cone", help="cone one boundary component")
    p.add_argument("triangulation")
    p.add_argument("--component", type=int, default=0)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("prism", help="prism triangulation over an acyclic surface")
    p.add_argument("surface")
    p.add_argument("--canonical-out", help="write the F x {0} vector here")
    p.set_defaults(func=cmd_prism)

    p = sub.add_parser("orient", help="remove cyclic triangles by subdivision")
    p.add_argument("surface")
    p.set_defaults(func=cmd_orient)

    p = sub.add_parser("enumerate", help="admissible vectors within a weight cap")
    p.add_argument("triangulation")
    p.add_argument("--max-w1", type=int, required=True)
    p.add_argument("--closed", action="store_true", help="no arcs on boundary faces")
    p.add_argument("--support", help="file of tet indices allowed to carry disks")
    p.set_defaults(func=cmd_enumerate)

    for name, func, help_text in (
        ("push", cmd_push, "push a source vector through a stored map"),
        ("classify", cmd_classify, "pull a target vector back through a stored map"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("vector")
        p.add_argument("--map", required=True, help="directory written by refine --map-out")
        p.set_defaults(func=func)

    for name, func, help_text in (
        ("weight", cmd_weight, "PL-area of a vector"),
        ("components", cmd_components, "connected components of a vector"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("triangulation")
        p.add_argument("vector")
        p.set_defaults(func=func)

    p = sub.add_parser("verify-theorem1", help="refinement correspondence within a cap")
    p.add_argument("triangulation")
    p.add_argument("--scale", required=True)
    p.add_argument("--max-w1", type=int, default=settings.default_max_w1)
    p.set_defaults(func=cmd_verify_theorem1)

    p = sub.add_parser("verify-weights", help="weight growth of every disk type")
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=cmd_verify_weights)

    p = sub.add_parser("verify-prism", help="uniqueness of the closed surface in the prism")
    p.add_argument("surface")
    p.add_argument("--max-w1", type=int, default=settings.default_max_w1)
    p.set_defaults(func=cmd_verify_prism)

    p = sub.add_parser("verify-outside", help="light surfaces stay in the prism")
    p.add_argument("surface")
    p.add_argument("--scale", type=int, default=settings.default_scale)
    p.add_argument("--max-w1", type=int, default=settings.default_max_w1)
    p.add_argument("--exterior-only", action="store_true")
    p.set_defaults(func=cmd_verify_outside)

    for name in ("verify-theorem1", "verify-weights", "verify-prism", "verify-outside"):
        sub.choices[name].add_argument("--no-timing", action="store_true", help="omit elapsed time")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (TopologyError, OSError, ValueError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
