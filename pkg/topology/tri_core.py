"""Combinatorial 3-manifold triangulations: gluing tables, validation, skeleton, coning, file format."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from .errors import (
    BoundaryComponentError,
    InvalidTriangulationError,
    TriangulationFormatError,
)
from .union_find import UnionFind

logger = logging.getLogger(__name__)

Perm = Tuple[int, int, int, int]

IDENTITY: Perm = (0, 1, 2, 3)

# Edge k of a tetrahedron joins EDGES[k]; the order fixes skeleton indices.
EDGES: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX: Dict[Tuple[int, int], int] = {pair: k for k, pair in enumerate(EDGES)}

# Quad q separates QUADS[q][0] from QUADS[q][1]; vertex 0 is always in the first block.
QUADS: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...] = (
    ((0, 1), (2, 3)),
    ((0, 2), (1, 3)),
    ((0, 3), (1, 2)),
)


def face_vertices(face: int) -> Tuple[int, int, int]:
    """Vertices of the face opposite ``face``, ascending."""
    return tuple(v for v in range(4) if v != face)


def edge_index(a: int, b: int) -> int:
    return EDGE_INDEX[(a, b) if a < b else (b, a)]


def quad_pairing(a: int, b: int) -> int:
    """Index of the quad type in which ``a`` and ``b`` lie in the same block."""
    if a == b:
        raise ValueError("quad pairing needs two distinct vertices")
    if a == 0 or b == 0:
        return a + b - 1
    return ({1, 2, 3} - {a, b}).pop() - 1


def invert(perm: Sequence[int]) -> Perm:
    inverse = [0, 0, 0, 0]
    for source, image in enumerate(perm):
        inverse[image] = source
    return tuple(inverse)


class Gluing(NamedTuple):
    """Face pairing target: face i of the owning tet goes to face perm[i] of ``tet``."""
    tet: int
    perm: Perm


@dataclass(frozen=True)
class Triangulation:
    """Gluing table of tetrahedra. ``gluings[t][i]`` is None for a boundary face."""
    tet_count: int
    gluings: Tuple[Tuple[Optional[Gluing], ...], ...]

    def gluing(self, tet: int, face: int) -> Optional[Gluing]:
        return self.gluings[tet][face]

    def boundary_faces(self) -> List[Tuple[int, int]]:
        return [
            (tet, face)
            for tet in range(self.tet_count)
            for face in range(4)
            if self.gluings[tet][face] is None
        ]

    def is_closed(self) -> bool:
        return not self.boundary_faces()

    def glued_face_pairs(self) -> List[Tuple[int, int, Gluing]]:
        """Each glued face pair once, from the side with the smaller (tet, face)."""
        pairs = []
        for tet in range(self.tet_count):
            for face in range(4):
                glue = self.gluings[tet][face]
                if glue is None:
                    continue
                if (tet, face) <= (glue.tet, glue.perm[face]):
                    pairs.append((tet, face, glue))
        return pairs


@dataclass(frozen=True)
class ValidationIssue:
    """One invariant violation; ``tet``/``face`` locate it in the gluing table."""
    tet: int
    face: int
    message: str

    def __str__(self) -> str:
        return f"tet {self.tet} face {self.face}: {self.message}"


def validate(t: Triangulation) -> List[ValidationIssue]:
    """List every invariant violation of ``t``; an empty list means valid."""
    issues: List[ValidationIssue] = []
    if len(t.gluings) != t.tet_count:
        issues.append(ValidationIssue(-1, -1, f"expected {t.tet_count} rows, found {len(t.gluings)}"))
        return issues

    for tet, row in enumerate(t.gluings):
        if len(row) != 4:
            issues.append(ValidationIssue(tet, -1, f"expected 4 faces, found {len(row)}"))
            continue
        for face, glue in enumerate(row):
            if glue is None:
                continue
            if not 0 <= glue.tet < t.tet_count:
                issues.append(ValidationIssue(tet, face, f"target tet {glue.tet} out of range"))
                continue
            if sorted(glue.perm) != [0, 1, 2, 3]:
                issues.append(ValidationIssue(tet, face, f"permutation {glue.perm} is not a bijection"))
                continue
            target_face = glue.perm[face]
            if glue.tet == tet and target_face == face and tuple(glue.perm) == IDENTITY:
                issues.append(ValidationIssue(tet, face, "face glued to itself by the identity"))
                continue
            back = t.gluings[glue.tet][target_face] if len(t.gluings[glue.tet]) == 4 else None
            if back is None or back.tet != tet or tuple(back.perm) != invert(glue.perm):
                issues.append(ValidationIssue(tet, face, "non-involutive gluing"))
    return issues


def build_triangulation(rows: Sequence[Sequence[Optional[Tuple[int, Sequence[int]]]]]) -> Triangulation:
    """Assemble and validate a triangulation from ``rows[t][i] = (target, perm)`` or None."""
    gluings = tuple(
        tuple(None if entry is None else Gluing(int(entry[0]), tuple(entry[1])) for entry in row)
        for row in rows
    )
    t = Triangulation(len(gluings), gluings)
    issues = validate(t)
    if issues:
        raise InvalidTriangulationError(issues)
    return t


def _parse_entry(token: str, line_no: int, tet_count: int) -> Optional[Gluing]:
    if token == "-":
        return None
    target, sep, digits = token.partition(":")
    if not sep or not target.isdigit() or len(digits) != 4 or not digits.isdigit():
        raise TriangulationFormatError(line_no, f"malformed entry {token!r}")
    target_tet = int(target)
    if target_tet >= tet_count:
        raise TriangulationFormatError(line_no, f"index out of range: tet {target_tet}")
    perm = tuple(int(ch) for ch in digits)
    if sorted(perm) != [0, 1, 2, 3]:
        raise TriangulationFormatError(line_no, f"permutation {digits} is not a bijection of 0123")
    return Gluing(target_tet, perm)


def parse_triangulation(text: str, check: bool = True) -> Triangulation:
    """Parse the ``tets N`` file format; tet order follows the file.

    With ``check`` false only the syntax is checked, so ``validate`` can list
    every invariant violation of the table.
    """
    rows: List[Tuple[Optional[Gluing], ...]] = []
    row_lines: List[int] = []
    tet_count: Optional[int] = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tet_count is None:
            if len(tokens) != 2 or tokens[0] != "tets" or not tokens[1].isdigit():
                raise TriangulationFormatError(line_no, "expected header 'tets N'")
            tet_count = int(tokens[1])
            continue
        if len(rows) == tet_count:
            raise TriangulationFormatError(line_no, "more tetrahedron lines than declared")
        if len(tokens) != 4:
            raise TriangulationFormatError(line_no, f"expected 4 face entries, found {len(tokens)}")
        rows.append(tuple(_parse_entry(token, line_no, tet_count) for token in tokens))
        row_lines.append(line_no)

    if tet_count is None:
        raise TriangulationFormatError(1, "missing header 'tets N'")
    if len(rows) != tet_count:
        raise TriangulationFormatError(
            len(text.splitlines()), f"declared {tet_count} tets, found {len(rows)}"
        )

    t = Triangulation(tet_count, tuple(rows))
    if not check:
        return t
    issues = validate(t)
    if issues:
        first = issues[0]
        raise TriangulationFormatError(row_lines[first.tet], first.message)
    return t


def serialize_triangulation(t: Triangulation) -> str:
    lines = [f"tets {t.tet_count}"]
    for row in t.gluings:
        entries = [
            "-" if glue is None else f"{glue.tet}:{''.join(str(v) for v in glue.perm)}"
            for glue in row
        ]
        lines.append(" ".join(entries))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Skeleton:
    """Cell classes of a triangulation.

    ``vertex_of[t][v]``, ``edge_of[t][k]`` and ``face_of[t][i]`` give the class
    index of each per-tet cell; the ``*_classes`` tuples list the members of
    each class as (tet, local index) pairs in order of first appearance.
    """
    tet_count: int
    vertex_of: Tuple[Tuple[int, ...], ...]
    edge_of: Tuple[Tuple[int, ...], ...]
    face_of: Tuple[Tuple[int, ...], ...]
    vertex_classes: Tuple[Tuple[Tuple[int, int], ...], ...]
    edge_classes: Tuple[Tuple[Tuple[int, int], ...], ...]
    face_classes: Tuple[Tuple[Tuple[int, int], ...], ...]

    @property
    def counts(self) -> Tuple[int, int, int, int]:
        return (
            len(self.vertex_classes),
            len(self.edge_classes),
            len(self.face_classes),
            self.tet_count,
        )


def _class_table(uf: UnionFind, tet_count: int, cells: int):
    classes = uf.classes()
    lookup = [[0] * cells for _ in range(tet_count)]
    for index, members in enumerate(classes):
        for tet, local in members:
            lookup[tet][local] = index
    return (
        tuple(tuple(row) for row in lookup),
        tuple(tuple(members) for members in classes),
    )


@lru_cache(maxsize=128)
def compute_skeleton(t: Triangulation) -> Skeleton:
    """Orbits of vertices, edges and faces under the face pairings."""
    vertices = UnionFind((tet, v) for tet in range(t.tet_count) for v in range(4))
    edges = UnionFind((tet, k) for tet in range(t.tet_count) for k in range(6))
    faces = UnionFind((tet, i) for tet in range(t.tet_count) for i in range(4))

    for tet, face, glue in t.glued_face_pairs():
        perm = glue.perm
        faces.union((tet, face), (glue.tet, perm[face]))
        corners = face_vertices(face)
        for v in corners:
            vertices.union((tet, v), (glue.tet, perm[v]))
        for a_pos in range(3):
            for b_pos in range(a_pos + 1, 3):
                a, b = corners[a_pos], corners[b_pos]
                edges.union((tet, edge_index(a, b)), (glue.tet, edge_index(perm[a], perm[b])))

    vertex_of, vertex_classes = _class_table(vertices, t.tet_count, 4)
    edge_of, edge_classes = _class_table(edges, t.tet_count, 6)
    face_of, face_classes = _class_table(faces, t.tet_count, 4)
    return Skeleton(t.tet_count, vertex_of, edge_of, face_of, vertex_classes, edge_classes, face_classes)


def _walk_to_boundary(t: Triangulation, tet: int, face: int, a: int, b: int) -> Tuple[int, int, int, int]:
    """Walk around edge ``ab`` from boundary face (tet, face) to the next boundary face.

    Returns the partner face and the labels the edge endpoints carry there.
    """
    cur, x, y, came = tet, a, b, face
    for _ in range(6 * t.tet_count + 1):
        nxt = ({0, 1, 2, 3} - {x, y, came}).pop()
        glue = t.gluings[cur][nxt]
        if glue is None:
            return cur, nxt, x, y
        perm = glue.perm
        cur, x, y, came = glue.tet, perm[x], perm[y], perm[nxt]
    raise BoundaryComponentError(f"edge walk from tet {tet} face {face} does not reach the boundary")


def boundary_components(t: Triangulation) -> List[Tuple[Tuple[int, int], ...]]:
    """Boundary faces grouped into components, each sorted, numbered by least face."""
    faces = t.boundary_faces()
    uf = UnionFind(faces)
    for tet, face in faces:
        corners = face_vertices(face)
        for skip in range(3):
            a, b = [corners[k] for k in range(3) if k != skip]
            partner_tet, partner_face, _, _ = _walk_to_boundary(t, tet, face, a, b)
            uf.union((tet, face), (partner_tet, partner_face))
    components = [tuple(sorted(members)) for members in uf.classes()]
    return sorted(components)


def _component(t: Triangulation, component: int) -> Tuple[Tuple[int, int], ...]:
    components = boundary_components(t)
    if not 0 <= component < len(components):
        raise BoundaryComponentError(
            f"boundary component {component} does not exist ({len(components)} components)"
        )
    return components[component]


def _component_edge_incidences(t: Triangulation, faces: Sequence[Tuple[int, int]]) -> Dict[int, int]:
    skeleton = compute_skeleton(t)
    incidences: Dict[int, int] = {}
    for tet, face in faces:
        corners = face_vertices(face)
        for a_pos in range(3):
            for b_pos in range(a_pos + 1, 3):
                cls = skeleton.edge_of[tet][edge_index(corners[a_pos], corners[b_pos])]
                incidences[cls] = incidences.get(cls, 0) + 1
    return incidences


def boundary_euler_characteristic(t: Triangulation, component: int) -> int:
    """V - E + F of one boundary component, counted through skeleton classes."""
    faces = _component(t, component)
    skeleton = compute_skeleton(t)
    vertex_classes = {
        skeleton.vertex_of[tet][v] for tet, face in faces for v in face_vertices(face)
    }
    edge_classes = _component_edge_incidences(t, faces)
    return len(vertex_classes) - len(edge_classes) + len(faces)


def cone_boundary(t: Triangulation, component: int) -> Triangulation:
    """Close one boundary component by coning it to a new vertex.

    Each boundary face (tet, i) of the component gets a new tetrahedron whose
    label 3 is the apex and whose labels 0..2 are the face's vertices in
    ascending order; new tets are appended in the component's face order.

    Raises:
        BoundaryComponentError: unknown component, or an edge of it does not
            lie in exactly two of its faces.
    """
    faces = _component(t, component)
    incidences = _component_edge_incidences(t, faces)
    open_edges = sorted(cls for cls, count in incidences.items() if count != 2)
    if open_edges:
        raise BoundaryComponentError(
            f"boundary component {component} is not closed (edge classes {open_edges})"
        )

    rows: List[List[Optional[Gluing]]] = [list(row) for row in t.gluings]
    cone_of: Dict[Tuple[int, int], int] = {}
    for offset, (tet, face) in enumerate(faces):
        apex_tet = t.tet_count + offset
        cone_of[(tet, face)] = apex_tet
        corners = face_vertices(face)
        to_base: Perm = (corners[0], corners[1], corners[2], face)
        rows.append([None, None, None, Gluing(tet, to_base)])
        rows[tet][face] = Gluing(apex_tet, invert(to_base))

    for tet, face in faces:
        apex_tet = cone_of[(tet, face)]
        corners = face_vertices(face)
        for skip in range(3):
            a, b = [corners[k] for k in range(3) if k != skip]
            other_tet, other_face, a2, b2 = _walk_to_boundary(t, tet, face, a, b)
            other_corners = face_vertices(other_face)
            third = ({0, 1, 2, 3} - {a2, b2, other_face}).pop()
            perm = [0, 0, 0, 3]
            perm[skip] = other_corners.index(third)
            perm[corners.index(a)] = other_corners.index(a2)
            perm[corners.index(b)] = other_corners.index(b2)
            rows[apex_tet][skip] = Gluing(cone_of[(other_tet, other_face)], tuple(perm))

    coned = Triangulation(len(rows), tuple(tuple(row) for row in rows))
    issues = validate(coned)
    if issues:
        raise InvalidTriangulationError(issues)
    logger.info(
        "Coned boundary component %d: %d faces, %d -> %d tets",
        component, len(faces), t.tet_count, coned.tet_count,
    )
    return coned


def cone_all_boundary(t: Triangulation) -> Triangulation:
    """Cone every boundary component, lowest-numbered first."""
    while boundary_components(t):
        t = cone_boundary(t, 0)
    return t


def tets_touching(t: Triangulation, tets: FrozenSet[int]) -> FrozenSet[int]:
    """Tets in ``tets`` plus every tet glued to one of them."""
    touched = set(tets)
    for tet in tets:
        for glue in t.gluings[tet]:
            if glue is not None:
                touched.add(glue.tet)
    return frozenset(touched)
