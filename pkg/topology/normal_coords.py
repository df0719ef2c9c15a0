"""Normal surface coordinates: matching equations, admissibility, PL-area, components."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DisconnectedSurfaceError,
    InadmissibleVectorError,
    NormalCoordinateError,
)
from .tri_core import (
    EDGES,
    QUADS,
    Triangulation,
    compute_skeleton,
    edge_index,
    face_vertices,
    quad_pairing,
)
from .union_find import UnionFind

logger = logging.getLogger(__name__)

# Coordinate slots per tetrahedron: t0..t3 then q1..q3.
SLOTS = 7
SLOT_NAMES = ("t0", "t1", "t2", "t3", "q1", "q2", "q3")

NormalVector = Tuple[int, ...]

# (face, corner) pairs in arc order; corners ascend within a face.
ARCS: Tuple[Tuple[int, int], ...] = tuple(
    (face, corner) for face in range(4) for corner in face_vertices(face)
)


def _build_arc_matrix() -> np.ndarray:
    matrix = np.zeros((len(ARCS), SLOTS), dtype=np.int64)
    for row, (face, corner) in enumerate(ARCS):
        matrix[row, corner] = 1
        matrix[row, 4 + quad_pairing(face, corner)] = 1
    return matrix


def _build_crossing_matrix() -> np.ndarray:
    matrix = np.zeros((len(EDGES), SLOTS), dtype=np.int64)
    for row, (a, b) in enumerate(EDGES):
        matrix[row, a] = 1
        matrix[row, b] = 1
        for q in range(3):
            if q != quad_pairing(a, b):
                matrix[row, 4 + q] = 1
    return matrix


ARC_MATRIX = _build_arc_matrix()
CROSSING_MATRIX = _build_crossing_matrix()


def arc_slot(face: int, corner: int) -> int:
    """Column of ``arc_counts`` output holding arcs on ``face`` that link ``corner``."""
    return face * 3 + face_vertices(face).index(corner)


@dataclass(frozen=True, order=True)
class PLArea:
    """Ordered pair (edge crossings, normal arcs); comparison is lexicographic."""
    w1: int
    w2: int

    def __add__(self, other: "PLArea") -> "PLArea":
        return PLArea(self.w1 + other.w1, self.w2 + other.w2)

    def __str__(self) -> str:
        return f"({self.w1}, {self.w2})"


class ArcType(NamedTuple):
    face_class: int
    corner: int


@dataclass(frozen=True)
class MatchingEquation:
    """Arcs of one type on a glued face pair must agree: lhs count == rhs count.

    Each side is a (tet, face, corner) triple naming the arc type as seen from
    that tetrahedron.
    """
    arc_type: ArcType
    lhs: Tuple[int, int, int]
    rhs: Tuple[int, int, int]

    def terms(self) -> Dict[int, int]:
        """Sparse coefficients over the flat coordinate index."""
        coefficients: Dict[int, int] = {}
        for sign, (tet, face, corner) in ((1, self.lhs), (-1, self.rhs)):
            for slot in (corner, 4 + quad_pairing(face, corner)):
                index = SLOTS * tet + slot
                coefficients[index] = coefficients.get(index, 0) + sign
        return {index: c for index, c in coefficients.items() if c != 0}

    def coefficients(self, tet_count: int) -> np.ndarray:
        row = np.zeros(SLOTS * tet_count, dtype=np.int64)
        for index, c in self.terms().items():
            row[index] = c
        return row


class Component(NamedTuple):
    vector: NormalVector
    euler_characteristic: int


def zero_vector(tet_count: int) -> NormalVector:
    return (0,) * (SLOTS * tet_count)


def add_vectors(u: Sequence[int], v: Sequence[int]) -> NormalVector:
    if len(u) != len(v):
        raise NormalCoordinateError(f"cannot add vectors of length {len(u)} and {len(v)}")
    return tuple(int(a) + int(b) for a, b in zip(u, v))


def as_matrix(t: Triangulation, v: Sequence[int]) -> np.ndarray:
    """View ``v`` as a (tet_count, 7) integer array, checking its length."""
    if len(v) != SLOTS * t.tet_count:
        raise NormalCoordinateError(
            f"vector has {len(v)} entries, expected {SLOTS * t.tet_count} for {t.tet_count} tets"
        )
    return np.asarray(v, dtype=np.int64).reshape(t.tet_count, SLOTS)


def arc_counts(t: Triangulation, v: Sequence[int]) -> np.ndarray:
    """Arc counts per tet, shape (tet_count, 12); column order follows ``ARCS``."""
    return as_matrix(t, v) @ ARC_MATRIX.T


def edge_crossings(t: Triangulation, v: Sequence[int]) -> np.ndarray:
    """Points on each tet-edge, shape (tet_count, 6); column order follows ``EDGES``."""
    return as_matrix(t, v) @ CROSSING_MATRIX.T


def matching_equations(t: Triangulation) -> List[MatchingEquation]:
    """One equation per glued face class and arc type."""
    skeleton = compute_skeleton(t)
    equations = []
    for tet, face, glue in t.glued_face_pairs():
        face_class = skeleton.face_of[tet][face]
        for corner in face_vertices(face):
            equations.append(
                MatchingEquation(
                    ArcType(face_class, corner),
                    (tet, face, corner),
                    (glue.tet, glue.perm[face], glue.perm[corner]),
                )
            )
    return equations


@lru_cache(maxsize=128)
def _matching_index(t: Triangulation) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    lhs_tet, lhs_arc, rhs_tet, rhs_arc = [], [], [], []
    for eq in matching_equations(t):
        lhs_tet.append(eq.lhs[0])
        lhs_arc.append(arc_slot(eq.lhs[1], eq.lhs[2]))
        rhs_tet.append(eq.rhs[0])
        rhs_arc.append(arc_slot(eq.rhs[1], eq.rhs[2]))
    return tuple(np.asarray(a, dtype=np.int64) for a in (lhs_tet, lhs_arc, rhs_tet, rhs_arc))


def matching_residuals(t: Triangulation, v: Sequence[int]) -> np.ndarray:
    """lhs - rhs for every matching equation, in ``matching_equations`` order."""
    arcs = arc_counts(t, v)
    lhs_tet, lhs_arc, rhs_tet, rhs_arc = _matching_index(t)
    return arcs[lhs_tet, lhs_arc] - arcs[rhs_tet, rhs_arc]


def admissibility_problems(t: Triangulation, v: Sequence[int]) -> List[str]:
    """Human-readable reasons ``v`` is not admissible; empty when it is."""
    matrix = as_matrix(t, v)
    problems = []
    negative = np.argwhere(matrix < 0)
    for tet, slot in negative[:3]:
        problems.append(f"negative coordinate {SLOT_NAMES[slot]} in tet {tet}")
    quad_types = np.count_nonzero(matrix[:, 4:], axis=1)
    for tet in np.flatnonzero(quad_types > 1)[:3]:
        problems.append(f"tet {tet} carries {quad_types[tet]} quad types")
    residuals = matching_residuals(t, v)
    bad = np.flatnonzero(residuals)
    if bad.size:
        equations = matching_equations(t)
        for k in bad[:3]:
            eq = equations[k]
            problems.append(
                f"arcs linking corner {eq.lhs[2]} on tet {eq.lhs[0]} face {eq.lhs[1]} "
                f"do not match across the gluing (residual {residuals[k]})"
            )
    return problems


def is_admissible(t: Triangulation, v: Sequence[int]) -> bool:
    matrix = as_matrix(t, v)
    if (matrix < 0).any():
        return False
    if (np.count_nonzero(matrix[:, 4:], axis=1) > 1).any():
        return False
    return not matching_residuals(t, v).any()


def require_admissible(t: Triangulation, v: Sequence[int]) -> None:
    problems = admissibility_problems(t, v)
    if problems:
        raise InadmissibleVectorError("; ".join(problems))


@lru_cache(maxsize=128)
def _weight_index(t: Triangulation) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    skeleton = compute_skeleton(t)
    edge_reps = [members[0] for members in skeleton.edge_classes]
    face_reps = [members[0] for members in skeleton.face_classes]
    return (
        np.asarray([tet for tet, _ in edge_reps], dtype=np.int64),
        np.asarray([k for _, k in edge_reps], dtype=np.int64),
        np.asarray([tet for tet, _ in face_reps], dtype=np.int64),
        np.asarray([face for _, face in face_reps], dtype=np.int64),
    )


def edge_class_crossings(t: Triangulation, v: Sequence[int]) -> np.ndarray:
    """Crossing count per edge class, read at each class's first incidence."""
    edge_tets, edge_locals, _, _ = _weight_index(t)
    return edge_crossings(t, v)[edge_tets, edge_locals]


def weight(t: Triangulation, v: Sequence[int]) -> PLArea:
    """PL-area of an admissible vector.

    Raises:
        InadmissibleVectorError: if ``v`` fails admissibility.
    """
    require_admissible(t, v)
    return pl_area(t, v)


def pl_area(t: Triangulation, v: Sequence[int]) -> PLArea:
    """PL-area without the admissibility check."""
    edge_tets, edge_locals, face_tets, face_locals = _weight_index(t)
    w1 = int(edge_crossings(t, v)[edge_tets, edge_locals].sum())
    arcs = arc_counts(t, v).reshape(t.tet_count, 4, 3)
    w2 = int(arcs[face_tets, face_locals, :].sum())
    return PLArea(w1, w2)


def vertex_link(t: Triangulation, vertex_class: int) -> NormalVector:
    """One triangle per corner incidence of ``vertex_class``."""
    skeleton = compute_skeleton(t)
    if not 0 <= vertex_class < len(skeleton.vertex_classes):
        raise NormalCoordinateError(f"vertex class {vertex_class} does not exist")
    vector = [0] * (SLOTS * t.tet_count)
    for tet, vertex in skeleton.vertex_classes[vertex_class]:
        vector[SLOTS * tet + vertex] += 1
    return tuple(vector)


def _quad_position(q: int, vertex: int, copy: int, count: int) -> int:
    """Offset of quad copy ``copy`` counted from ``vertex``; copy 0 is nearest the first block."""
    return copy if vertex in QUADS[q][0] else count - 1 - copy


def _disk_cells(counts: Sequence[int], tet: int, slot: int, copy: int):
    """Boundary arcs and edge points of one disk, as cell keys."""
    arcs = []
    points = []
    crossings = CROSSING_MATRIX @ np.asarray(counts, dtype=np.int64)
    if slot < 4:
        corner = slot
        for face in range(4):
            if face != corner:
                arcs.append((tet, face, corner, copy))
        for other in range(4):
            if other == corner:
                continue
            k = edge_index(corner, other)
            position = copy if corner < other else int(crossings[k]) - 1 - copy
            points.append((tet, k, position))
        return arcs, points

    q = slot - 4
    n = counts[slot]
    first, second = QUADS[q]
    for face in range(4):
        block = first if face in first else second
        corner = block[0] if block[1] == face else block[1]
        arcs.append((tet, face, corner, counts[corner] + _quad_position(q, face, copy, n)))
    for a in first:
        for b in second:
            low = min(a, b)
            points.append((tet, edge_index(a, b), counts[low] + _quad_position(q, low, copy, n)))
    return arcs, points


def components(t: Triangulation, v: Sequence[int]) -> List[Component]:
    """Split an admissible vector into connected surfaces.

    Every disk is instantiated; parallel arcs of one type on a face are glued
    nested, k-th from the linked corner to k-th from its image. Components are
    ordered by their first disk (tet-major, then slot, then copy) and carry
    the Euler characteristic of their cell complex.
    """
    require_admissible(t, v)
    matrix = as_matrix(t, v)

    disks: List[Tuple[int, int, int]] = []
    arc_owner: Dict[Tuple[int, int, int, int], int] = {}
    point_owner: Dict[Tuple[int, int, int], int] = {}
    for tet in range(t.tet_count):
        counts = [int(x) for x in matrix[tet]]
        for slot in range(SLOTS):
            for copy in range(counts[slot]):
                disk_id = len(disks)
                disks.append((tet, slot, copy))
                disk_arcs, disk_points = _disk_cells(counts, tet, slot, copy)
                for key in disk_arcs:
                    arc_owner[key] = disk_id
                for key in disk_points:
                    point_owner[key] = disk_id

    arc_classes = UnionFind(arc_owner)
    point_classes = UnionFind(point_owner)
    arcs = arc_counts(t, v)
    crossings = edge_crossings(t, v)
    for tet, face, glue in t.glued_face_pairs():
        u, perm = glue.tet, glue.perm
        corners = face_vertices(face)
        for corner in corners:
            for k in range(int(arcs[tet, arc_slot(face, corner)])):
                arc_classes.union((tet, face, corner, k), (u, perm[face], perm[corner], k))
        for a_pos in range(3):
            for b_pos in range(a_pos + 1, 3):
                a, b = corners[a_pos], corners[b_pos]
                total = int(crossings[tet, edge_index(a, b)])
                for k in range(total):
                    here = k if a < b else total - 1 - k
                    there = k if perm[a] < perm[b] else total - 1 - k
                    point_classes.union(
                        (tet, edge_index(a, b), here),
                        (u, edge_index(perm[a], perm[b]), there),
                    )

    surface = UnionFind(range(len(disks)))
    for members in arc_classes.classes():
        for key in members[1:]:
            surface.union(arc_owner[members[0]], arc_owner[key])
    for members in point_classes.classes():
        for key in members[1:]:
            surface.union(point_owner[members[0]], point_owner[key])

    root_order: Dict[int, int] = {}
    for disk_id in range(len(disks)):
        root_order.setdefault(surface.find(disk_id), len(root_order))

    vectors = [[0] * (SLOTS * t.tet_count) for _ in root_order]
    euler = [0] * len(root_order)
    for disk_id, (tet, slot, _) in enumerate(disks):
        index = root_order[surface.find(disk_id)]
        vectors[index][SLOTS * tet + slot] += 1
        euler[index] += 1
    for members in arc_classes.classes():
        euler[root_order[surface.find(arc_owner[members[0]])]] -= 1
    for members in point_classes.classes():
        euler[root_order[surface.find(point_owner[members[0]])]] += 1

    result = [Component(tuple(vec), chi) for vec, chi in zip(vectors, euler)]
    logger.debug("Split vector into %d components", len(result))
    return result


def is_vertex_linking(t: Triangulation, v: Sequence[int], vertex_class: int) -> bool:
    """True iff ``v`` is exactly the link of ``vertex_class``.

    Raises:
        InadmissibleVectorError: ``v`` is not admissible.
        DisconnectedSurfaceError: ``v`` has more than one component.
    """
    parts = components(t, v)
    if len(parts) > 1:
        raise DisconnectedSurfaceError(f"vector has {len(parts)} components")
    if not parts:
        return False
    return tuple(int(x) for x in v) == vertex_link(t, vertex_class)


def supported_in(t: Triangulation, v: Sequence[int], tets: Iterable[int]) -> bool:
    matrix = as_matrix(t, v)
    allowed = np.zeros(t.tet_count, dtype=bool)
    allowed[list(tets)] = True
    return not matrix[~allowed].any()


def parse_normal_vector(text: str, tet_count: Optional[int] = None) -> NormalVector:
    """Parse one vector block: a line of 7 integers per tetrahedron."""
    values: List[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != SLOTS:
            raise NormalCoordinateError(f"line {line_no}: expected {SLOTS} integers, found {len(tokens)}")
        try:
            row = [int(token) for token in tokens]
        except ValueError as e:
            raise NormalCoordinateError(f"line {line_no}: {e}") from e
        if any(x < 0 for x in row):
            raise NormalCoordinateError(f"line {line_no}: coordinates must be non-negative")
        values.extend(row)
    if tet_count is not None and len(values) != SLOTS * tet_count:
        raise NormalCoordinateError(
            f"vector covers {len(values) // SLOTS} tets, triangulation has {tet_count}"
        )
    return tuple(values)


def serialize_normal_vector(v: Sequence[int]) -> str:
    rows = [v[i:i + SLOTS] for i in range(0, len(v), SLOTS)]
    return "".join(" ".join(str(int(x)) for x in row) + "\n" for row in rows)


def parse_vector_blocks(text: str, tet_count: Optional[int] = None) -> List[NormalVector]:
    """Parse blank-line separated vector blocks, with an optional ``count K`` header."""
    blocks: List[List[str]] = [[]]
    declared: Optional[int] = None
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("count "):
            declared = int(line.split()[1])
            continue
        if not line:
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append(line)
    vectors = [parse_normal_vector("\n".join(block), tet_count) for block in blocks if block]
    if declared is not None and declared != len(vectors):
        raise NormalCoordinateError(f"header declares {declared} vectors, found {len(vectors)}")
    return vectors


def serialize_vector_blocks(vectors: Sequence[Sequence[int]]) -> str:
    blocks = [serialize_normal_vector(v) for v in vectors]
    return f"count {len(vectors)}\n" + "\n".join(blocks)
