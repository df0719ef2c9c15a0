"""Desk-scale triangulations and surfaces used by tests, the CLI and the API."""

from typing import Callable, Dict, List, Sequence, Tuple

from .prism_builder import SLOT_ENDS, EdgeGluing, SurfaceTriangulation, check_surface, serialize_surface
from .tri_core import Triangulation, build_triangulation, serialize_triangulation

IDENTITY = (0, 1, 2, 3)


def single_tetrahedron() -> Triangulation:
    return build_triangulation([[None, None, None, None]])


def doubled_tetrahedron() -> Triangulation:
    """Two tets with face i of one glued to face i of the other by the identity."""
    return build_triangulation([
        [(1, IDENTITY)] * 4,
        [(0, IDENTITY)] * 4,
    ])


def surface_from_faces(faces: Sequence[Tuple[int, int, int]]) -> SurfaceTriangulation:
    """Surface from vertex triples; corners ascend and edges point from lower to higher vertex.

    Raises:
        ValueError: an edge lies in more than two triangles.
    """
    incidences: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for i, face in enumerate(faces):
        corners = sorted(face)
        for k, (a, b) in enumerate(SLOT_ENDS):
            incidences.setdefault((corners[a], corners[b]), []).append((i, k))

    rows = [[None, None, None] for _ in faces]
    for edge, members in incidences.items():
        if len(members) > 2:
            raise ValueError(f"edge {edge} lies in {len(members)} triangles")
        if len(members) == 2:
            (i, k), (j, l) = members
            rows[i][k] = EdgeGluing(j, l, False)
            rows[j][l] = EdgeGluing(i, k, False)
    orientation = tuple((True, True, True) for _ in faces)
    return check_surface(
        SurfaceTriangulation(len(faces), tuple(tuple(row) for row in rows), orientation)
    )


def tetrahedron_boundary() -> SurfaceTriangulation:
    """The 2-sphere as the boundary of a tetrahedron, oriented by vertex order."""
    return surface_from_faces([(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)])


def single_triangle(cyclic: bool = False) -> SurfaceTriangulation:
    """One triangle with boundary edges; cyclic orients them 0->1, 1->2, 2->0."""
    flags = (True, False, True) if cyclic else (True, True, True)
    return SurfaceTriangulation(1, ((None, None, None),), (flags,))


def two_triangles() -> SurfaceTriangulation:
    """Two triangles sharing the edge 1-2."""
    return surface_from_faces([(0, 1, 2), (1, 2, 3)])


SAMPLES: Dict[str, Tuple[str, Callable[[], str]]] = {
    "single-tet": ("triangulation", lambda: serialize_triangulation(single_tetrahedron())),
    "doubled-tet": ("triangulation", lambda: serialize_triangulation(doubled_tetrahedron())),
    "tetrahedron-boundary": ("surface", lambda: serialize_surface(tetrahedron_boundary())),
    "triangle": ("surface", lambda: serialize_surface(single_triangle())),
    "cyclic-triangle": ("surface", lambda: serialize_surface(single_triangle(cyclic=True))),
    "two-triangles": ("surface", lambda: serialize_surface(two_triangles())),
}


def sample_text(name: str) -> Tuple[str, str]:
    """Return (kind, file text) of a named sample.

    Raises:
        KeyError: unknown sample name.
    """
    kind, render = SAMPLES[name]
    return kind, render()
