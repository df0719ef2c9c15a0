"""Prism triangulations of F x I over an edge-oriented surface triangulation."""

import logging
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from .errors import (
    CyclicTriangleError,
    InconsistentOrientationError,
    NonSphereBoundaryError,
    SurfaceFormatError,
)
from .normal_coords import SLOTS, NormalVector, as_matrix
from .refinement import RefinementMap, refine_scaled
from .tri_core import (
    Triangulation,
    boundary_components,
    boundary_euler_characteristic,
    build_triangulation,
    cone_all_boundary,
)

logger = logging.getLogger(__name__)

# Edge slot k of a triangle is opposite corner k and joins SLOT_ENDS[k].
SLOT_ENDS: Tuple[Tuple[int, int], ...] = ((1, 2), (0, 2), (0, 1))


class EdgeGluing(NamedTuple):
    """Partner edge slot; ``reversed`` pairs the low corner with the partner's high corner."""
    triangle: int
    slot: int
    reversed: bool


Orientation = Tuple[Tuple[bool, bool, bool], ...]


@dataclass(frozen=True)
class SurfaceTriangulation:
    """Triangles with glued edge slots.

    ``orientation[i][k]`` is True when the edge in slot ``k`` runs from its
    lower corner label to its higher one; None means no orientation yet.
    """
    triangle_count: int
    gluings: Tuple[Tuple[Optional[EdgeGluing], ...], ...]
    orientation: Optional[Orientation] = None

    def is_closed(self) -> bool:
        return all(g is not None for row in self.gluings for g in row)


def surface_issues(s: SurfaceTriangulation) -> List[str]:
    issues = []
    if len(s.gluings) != s.triangle_count:
        return [f"expected {s.triangle_count} triangles, found {len(s.gluings)}"]
    for i, row in enumerate(s.gluings):
        for k, glue in enumerate(row):
            if glue is None:
                continue
            if not 0 <= glue.triangle < s.triangle_count or not 0 <= glue.slot < 3:
                issues.append(f"triangle {i} slot {k}: partner out of range")
                continue
            if (glue.triangle, glue.slot) == (i, k):
                issues.append(f"triangle {i} slot {k}: edge glued to itself")
                continue
            back = s.gluings[glue.triangle][glue.slot]
            if back != EdgeGluing(i, k, glue.reversed):
                issues.append(f"triangle {i} slot {k}: non-involutive edge gluing")
    if s.orientation is not None:
        if len(s.orientation) != s.triangle_count:
            issues.append("orientation section does not cover every triangle")
        else:
            for i, row in enumerate(s.gluings):
                for k, glue in enumerate(row):
                    if glue is None:
                        continue
                    partner = s.orientation[glue.triangle][glue.slot]
                    if (s.orientation[i][k] == partner) == glue.reversed:
                        issues.append(f"triangle {i} slot {k}: orientation disagrees with its partner")
    return issues


def check_surface(s: SurfaceTriangulation) -> SurfaceTriangulation:
    """Return ``s`` unchanged if valid.

    Raises:
        InconsistentOrientationError: glued slots disagree on a direction.
        SurfaceFormatError: any other structural problem.
    """
    issues = surface_issues(s)
    orientation_issues = [msg for msg in issues if "orientation disagrees" in msg]
    if orientation_issues:
        raise InconsistentOrientationError("; ".join(orientation_issues[:3]))
    if issues:
        raise SurfaceFormatError(0, "; ".join(issues[:3]))
    return s


def _parse_slot(token: str, line_no: int) -> Optional[EdgeGluing]:
    if token == "-":
        return None
    target, sep, sign = token.partition(":")
    triangle, dot, slot = target.partition(".")
    if not sep or not dot or sign not in ("+", "-") or not triangle.isdigit() or slot not in ("0", "1", "2"):
        raise SurfaceFormatError(line_no, f"malformed edge entry {token!r}")
    return EdgeGluing(int(triangle), int(slot), sign == "-")


def parse_surface(text: str) -> SurfaceTriangulation:
    """Parse ``triangles N``, N slot lines, then an optional ``orientation`` section."""
    count: Optional[int] = None
    rows: List[Tuple[Optional[EdgeGluing], ...]] = []
    flags: List[Tuple[bool, bool, bool]] = []
    in_orientation = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if count is None:
            if len(tokens) != 2 or tokens[0] != "triangles" or not tokens[1].isdigit():
                raise SurfaceFormatError(line_no, "expected header 'triangles N'")
            count = int(tokens[1])
            continue
        if tokens == ["orientation"]:
            in_orientation = True
            continue
        if len(tokens) != 3:
            raise SurfaceFormatError(line_no, f"expected 3 entries, found {len(tokens)}")
        if in_orientation:
            if any(tok not in ("+", "-") for tok in tokens):
                raise SurfaceFormatError(line_no, "orientation entries must be '+' or '-'")
            if len(flags) == count:
                raise SurfaceFormatError(line_no, "more orientation lines than triangles")
            flags.append(tuple(tok == "+" for tok in tokens))
            continue
        if len(rows) == count:
            raise SurfaceFormatError(line_no, "more triangle lines than declared")
        rows.append(tuple(_parse_slot(tok, line_no) for tok in tokens))

    if count is None:
        raise SurfaceFormatError(1, "missing header 'triangles N'")
    if len(rows) != count:
        raise SurfaceFormatError(0, f"declared {count} triangles, found {len(rows)}")
    if in_orientation and len(flags) != count:
        raise SurfaceFormatError(0, f"orientation section has {len(flags)} lines, expected {count}")
    return check_surface(SurfaceTriangulation(count, tuple(rows), tuple(flags) if in_orientation else None))


def serialize_surface(s: SurfaceTriangulation) -> str:
    lines = [f"triangles {s.triangle_count}"]
    for row in s.gluings:
        lines.append(
            " ".join(
                "-" if g is None else f"{g.triangle}.{g.slot}:{'-' if g.reversed else '+'}" for g in row
            )
        )
    if s.orientation is not None:
        lines.append("orientation")
        for row in s.orientation:
            lines.append(" ".join("+" if flag else "-" for flag in row))
    return "\n".join(lines) + "\n"


def assign_orientation(s: SurfaceTriangulation) -> SurfaceTriangulation:
    """Direct each unoriented edge class from low to high corner in its first incidence."""
    if s.orientation is not None:
        return s
    flags: List[List[Optional[bool]]] = [[None, None, None] for _ in range(s.triangle_count)]
    for i, row in enumerate(s.gluings):
        for k, glue in enumerate(row):
            if flags[i][k] is not None:
                continue
            flags[i][k] = True
            if glue is not None:
                flags[glue.triangle][glue.slot] = not glue.reversed
    return replace(s, orientation=tuple(tuple(row) for row in flags))


def out_degrees(flags: Sequence[bool]) -> Tuple[int, int, int]:
    degree = [0, 0, 0]
    for k, forward in enumerate(flags):
        low, high = SLOT_ENDS[k]
        degree[low if forward else high] += 1
    return tuple(degree)


def is_cyclic(flags: Sequence[bool]) -> bool:
    return out_degrees(flags) == (1, 1, 1)


def count_cyclic(s: SurfaceTriangulation) -> int:
    oriented = assign_orientation(s)
    return sum(1 for flags in oriented.orientation if is_cyclic(flags))


def _subdivide(
    gluings: List[List[Optional[EdgeGluing]]],
    flags: List[List[bool]],
    i: int,
) -> None:
    """Cone triangle ``i`` to an interior point d; new edges run out of d."""
    n = len(gluings)
    a_tri, b_tri, c_tri = i, n, n + 1
    # slot 2 (ab) stays, slot 0 (bc) moves to b_tri, slot 1 (ac) moves to c_tri; all land in slot 2.
    moved = {(i, 2): (a_tri, 2), (i, 0): (b_tri, 2), (i, 1): (c_tri, 2)}
    old_row = gluings[i]
    old_flags = flags[i]
    gluings[i] = [None, None, None]
    gluings.extend([[None, None, None], [None, None, None]])
    flags[i] = [False, False, old_flags[2]]
    flags.append([False, False, old_flags[0]])
    flags.append([False, False, old_flags[1]])

    for k, glue in enumerate(old_row):
        here = moved[(i, k)]
        if glue is None:
            continue
        there = moved.get((glue.triangle, glue.slot), (glue.triangle, glue.slot))
        gluings[here[0]][here[1]] = EdgeGluing(there[0], there[1], glue.reversed)
        if glue.triangle != i:
            gluings[there[0]][there[1]] = EdgeGluing(here[0], here[1], glue.reversed)

    internal = (
        ((a_tri, 1), (c_tri, 1)),  # ad
        ((a_tri, 0), (b_tri, 1)),  # bd
        ((b_tri, 0), (c_tri, 0)),  # cd
    )
    for (t1, k1), (t2, k2) in internal:
        gluings[t1][k1] = EdgeGluing(t2, k2, False)
        gluings[t2][k2] = EdgeGluing(t1, k1, False)


def orient_acyclic(s: SurfaceTriangulation) -> SurfaceTriangulation:
    """Subdivide the lowest-indexed cyclic triangle until none is left.

    Each subdivision removes exactly one cyclic triangle and adds two
    triangles, so the loop runs ``count_cyclic(s)`` times.
    """
    oriented = check_surface(assign_orientation(s))
    gluings = [list(row) for row in oriented.gluings]
    flags = [list(row) for row in oriented.orientation]
    iterations = 0
    while True:
        cyclic = next((i for i, row in enumerate(flags) if is_cyclic(row)), None)
        if cyclic is None:
            break
        _subdivide(gluings, flags, cyclic)
        iterations += 1
    logger.info("Removed %d cyclic triangles: %d -> %d triangles", iterations, oriented.triangle_count, len(gluings))
    return SurfaceTriangulation(
        len(gluings), tuple(tuple(row) for row in gluings), tuple(tuple(row) for row in flags)
    )


# Prism tet vertices as (rank, level): rank orders the triangle corners v0, v1, v2,
# level 0 is the bottom copy v and 1 the top copy w.
PRISM_TETS: Tuple[Tuple[Tuple[int, int], ...], ...] = (
    ((0, 0), (0, 1), (1, 1), (2, 1)),
    ((0, 0), (1, 0), (1, 1), (2, 1)),
    ((0, 0), (1, 0), (2, 0), (2, 1)),
)
TOP_FACE = (0, 0)
BOTTOM_FACE = (2, 3)
# Canonical F x {0} disk per block tet: triangle linking v0, quad {v0 v1}|{w1 w2}, triangle linking w2.
CANONICAL_SLOTS = (0, 4, 3)


@dataclass(frozen=True)
class PrismComplex:
    triangulation: Triangulation
    prism_tets: FrozenSet[int]
    canonical: NormalVector
    blocks: Tuple[Tuple[int, int, int], ...]
    surface: SurfaceTriangulation
    corner_order: Tuple[Tuple[int, int, int], ...]


def vertex_order(flags: Sequence[bool]) -> Tuple[int, int, int]:
    """Corners as (v0, v1, v2): v0 is the source of two edges, v2 the sink of two."""
    degree = out_degrees(flags)
    if sorted(degree) != [0, 1, 2]:
        raise CyclicTriangleError(f"edge orientation {tuple(flags)} is cyclic")
    return (degree.index(2), degree.index(1), degree.index(0))


def build_prism(s: SurfaceTriangulation) -> PrismComplex:
    """Triangulate F x I with three tets per triangle.

    Blocks of edge-adjacent triangles meet along the side square split by the
    diagonal from the bottom of an edge's source to the top of its sink.

    Raises:
        CyclicTriangleError: a triangle is cyclically oriented.
        InconsistentOrientationError: glued slots disagree on a direction.
    """
    oriented = check_surface(assign_orientation(s))
    for i, flags in enumerate(oriented.orientation):
        if is_cyclic(flags):
            raise CyclicTriangleError(f"triangle {i} is cyclically oriented")

    orders = tuple(vertex_order(flags) for flags in oriented.orientation)
    count = oriented.triangle_count
    rows: List[List[Optional[Tuple[int, Tuple[int, ...]]]]] = [[None] * 4 for _ in range(3 * count)]

    identity = (0, 1, 2, 3)
    for i in range(count):
        base = 3 * i
        rows[base][1] = (base + 1, identity)
        rows[base + 1][1] = (base, identity)
        rows[base + 1][2] = (base + 2, identity)
        rows[base + 2][2] = (base + 1, identity)

    def side_faces(i: int) -> Dict[FrozenSet[Tuple[int, int]], Tuple[int, int, Dict[Tuple[int, int], int]]]:
        """Side faces of block ``i`` keyed by their (corner, level) vertex sets."""
        order = orders[i]
        faces = {}
        for d, verts in enumerate(PRISM_TETS):
            keyed = [(order[rank], level) for rank, level in verts]
            for face in range(4):
                if (d, face) in ((1, 1), (1, 2), (0, 1), (2, 2), TOP_FACE, BOTTOM_FACE):
                    continue
                members = {keyed[label]: label for label in range(4) if label != face}
                faces[frozenset(members)] = (3 * i + d, face, members)
        return faces

    sides = [side_faces(i) for i in range(count)]
    for i, row in enumerate(oriented.gluings):
        for k, glue in enumerate(row):
            if glue is None:
                continue
            ends = SLOT_ENDS[k]
            partner_ends = SLOT_ENDS[glue.slot]
            if glue.reversed:
                partner_ends = partner_ends[::-1]
            corner_map = dict(zip(ends, partner_ends))
            for key, (tet, face, members) in sides[i].items():
                if not {corner for corner, _ in key} <= set(ends):
                    continue
                image = frozenset((corner_map[c], level) for c, level in key)
                if image not in sides[glue.triangle]:
                    raise InconsistentOrientationError(
                        f"triangle {i} slot {k}: side diagonal does not match triangle {glue.triangle}"
                    )
                other_tet, other_face, other_members = sides[glue.triangle][image]
                perm = [0, 0, 0, 0]
                perm[face] = other_face
                for (c, level), label in members.items():
                    perm[label] = other_members[(corner_map[c], level)]
                rows[tet][face] = (other_tet, tuple(perm))

    triangulation = build_triangulation(rows)
    canonical = [0] * (SLOTS * triangulation.tet_count)
    for i in range(count):
        for d, slot in enumerate(CANONICAL_SLOTS):
            canonical[SLOTS * (3 * i + d) + slot] = 1
    logger.info("Built prism over %d triangles: %d tets", count, triangulation.tet_count)
    return PrismComplex(
        triangulation,
        frozenset(range(triangulation.tet_count)),
        tuple(canonical),
        tuple((3 * i, 3 * i + 1, 3 * i + 2) for i in range(count)),
        oriented,
        orders,
    )


def block_profile(p: PrismComplex, v: Sequence[int]) -> List[Tuple[int, int, int]]:
    """Per block: triangles linking v0 in the first tet, {v0 v1} quads in the second, triangles linking w2 in the third."""
    matrix = as_matrix(p.triangulation, v)
    return [
        tuple(int(matrix[tet, slot]) for tet, slot in zip(block, CANONICAL_SLOTS))
        for block in p.blocks
    ]


class HeavyExterior(NamedTuple):
    triangulation: Triangulation
    refinement: RefinementMap
    prism_tets: FrozenSet[int]
    cone_tets: int


def build_heavy_exterior(p: PrismComplex, n: int) -> HeavyExterior:
    """Cone off every boundary sphere of the prism, then refine only the cone tets ``n`` times.

    Raises:
        NonSphereBoundaryError: a boundary component is not a 2-sphere.
    """
    if n < 0:
        raise ValueError("scale must be non-negative")
    t = p.triangulation
    for index, _ in enumerate(boundary_components(t)):
        chi = boundary_euler_characteristic(t, index)
        if chi != 2:
            raise NonSphereBoundaryError(
                f"boundary component {index} has Euler characteristic {chi}; only spheres can be coned"
            )
    closed = cone_all_boundary(t)
    cone_tets = closed.tet_count - t.tet_count
    scale = [0] * t.tet_count + [n] * cone_tets
    refined, m = refine_scaled(closed, scale)
    prism_tets = m.descendant_tets(sorted(p.prism_tets))
    logger.info(
        "Heavy exterior at scale %d: %d prism tets, %d cone tets, %d tets after refinement",
        n, len(prism_tets), cone_tets, refined.tet_count,
    )
    return HeavyExterior(refined, m, prism_tets, cone_tets)
