"""Shared fixtures for the test suite."""

import random
from typing import List, Sequence, Tuple

import pytest

from topology.prism_builder import SLOT_ENDS, EdgeGluing, SurfaceTriangulation, build_prism, check_surface
from topology.samples import doubled_tetrahedron, single_tetrahedron, tetrahedron_boundary
from topology.tri_core import build_triangulation

collect_ignore = ["examples"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive checks at the full acceptance caps")


@pytest.fixture
def single_tet():
    return single_tetrahedron()


@pytest.fixture
def doubled_tet():
    return doubled_tetrahedron()


@pytest.fixture
def chain_of_three():
    """Three tets in a row: tet 0 face 0 on tet 1 face 0, tet 1 face 1 on tet 2 face 1."""
    identity = (0, 1, 2, 3)
    return build_triangulation([
        [(1, identity), None, None, None],
        [(0, identity), (2, identity), None, None],
        [None, (1, identity), None, None],
    ])


@pytest.fixture
def folded_tet():
    """One tet with face 0 folded onto face 1 by swapping vertices 0 and 1."""
    swap = (1, 0, 2, 3)
    return build_triangulation([[(0, swap), (0, swap), None, None]])


@pytest.fixture(scope="session")
def sphere_prism():
    return build_prism(tetrahedron_boundary())


def surface_from_corners(faces: Sequence[Tuple[int, int, int]]) -> SurfaceTriangulation:
    """Surface whose triangle corners keep the given order, so gluings may be reversed."""
    slots = {}
    rows: List[List] = [[None, None, None] for _ in faces]
    for i, corners in enumerate(faces):
        for k, (a, b) in enumerate(SLOT_ENDS):
            low, high = corners[a], corners[b]
            key = frozenset((low, high))
            if key in slots:
                j, l, other_low = slots.pop(key)
                reversed_ = low != other_low
                rows[i][k] = EdgeGluing(j, l, reversed_)
                rows[j][l] = EdgeGluing(i, k, reversed_)
            else:
                slots[key] = (i, k, low)
    return SurfaceTriangulation(len(faces), tuple(tuple(row) for row in rows))


def random_orientation(s: SurfaceTriangulation, rng: random.Random) -> SurfaceTriangulation:
    """Pick a random direction per edge class and propagate it across gluings."""
    flags = [[None, None, None] for _ in range(s.triangle_count)]
    for i, row in enumerate(s.gluings):
        for k, glue in enumerate(row):
            if flags[i][k] is not None:
                continue
            flags[i][k] = rng.random() < 0.5
            if glue is not None:
                flags[glue.triangle][glue.slot] = flags[i][k] != glue.reversed
    return check_surface(
        SurfaceTriangulation(s.triangle_count, s.gluings, tuple(tuple(row) for row in flags))
    )


def random_surface(rng: random.Random) -> SurfaceTriangulation:
    """A suspended polygon (closed sphere) or an open fan, corners shuffled, edges randomly directed."""
    rim = rng.randint(3, 15)
    ring = [(r, r % rim + 1) for r in range(1, rim + 1)]
    if rng.random() < 0.5:
        north, south = rim + 1, rim + 2
        faces = [(north, a, b) for a, b in ring] + [(south, a, b) for a, b in ring]
    else:
        faces = [(0, a, b) for a, b in ring[: rng.randint(1, rim)]]
    shuffled = []
    for face in faces:
        corners = list(face)
        rng.shuffle(corners)
        shuffled.append(tuple(corners))
    return random_orientation(surface_from_corners(shuffled), rng)


@pytest.fixture
def surface_corpus():
    rng = random.Random(20240617)
    return [random_surface(rng) for _ in range(25)]
