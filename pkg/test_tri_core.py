"""Tests for gluing tables, skeleton, boundary and coning."""

import pytest

from topology.errors import BoundaryComponentError, InvalidTriangulationError, TriangulationFormatError
from topology.tri_core import (
    EDGES,
    Gluing,
    Triangulation,
    boundary_components,
    boundary_euler_characteristic,
    build_triangulation,
    compute_skeleton,
    cone_all_boundary,
    cone_boundary,
    edge_index,
    invert,
    parse_triangulation,
    quad_pairing,
    serialize_triangulation,
    tets_touching,
    validate,
)

DOUBLED = """\
# two tets glued face to face
tets 2
1:0123 1:0123 1:0123 1:0123
0:0123 0:0123 0:0123 0:0123
"""


def test_parse_and_serialize(doubled_tet):
    t = parse_triangulation(DOUBLED)
    assert t == doubled_tet
    assert serialize_triangulation(t) == "tets 2\n" + "1:0123 " * 3 + "1:0123\n" + "0:0123 " * 3 + "0:0123\n"
    assert parse_triangulation(serialize_triangulation(t)) == t


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("", 1, "missing header"),
        ("tet 1\n- - - -\n", 1, "expected header"),
        ("tets 1\n- - -\n", 2, "expected 4 face entries"),
        ("tets 1\n0:0123 - x -\n", 2, "malformed entry"),
        ("tets 1\n3:0123 - - -\n", 2, "index out of range"),
        ("tets 1\n0:0113 - - -\n", 2, "not a bijection"),
        ("tets 2\n- - - -\n", 2, "declared 2 tets, found 1"),
        ("tets 1\n- - - -\n- - - -\n", 3, "more tetrahedron lines"),
        ("tets 2\n- - - -\n0:0123 - - -\n", 3, "non-involutive"),
    ],
)
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(TriangulationFormatError) as info:
        parse_triangulation(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_unchecked_parse_keeps_every_problem():
    text = "tets 2\n0:0123 1:0123 - -\n- - - -\n"
    with pytest.raises(TriangulationFormatError):
        parse_triangulation(text)
    issues = validate(parse_triangulation(text, check=False))
    assert [str(issue) for issue in issues] == [
        "tet 0 face 0: face glued to itself by the identity",
        "tet 0 face 1: non-involutive gluing",
    ]


def test_validate_reports_every_problem():
    identity = (0, 1, 2, 3)
    t = Triangulation(2, (
        (Gluing(1, identity), Gluing(0, identity), None, None),
        (None, None, None, None),
    ))
    messages = [issue.message for issue in validate(t)]
    assert "non-involutive gluing" in messages
    assert "face glued to itself by the identity" in messages

    with pytest.raises(InvalidTriangulationError) as info:
        build_triangulation([[(1, identity), None, None, None], [None] * 4])
    assert len(info.value.issues) == 1


def test_index_helpers():
    assert EDGES == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    assert edge_index(3, 1) == 4
    assert [quad_pairing(0, b) for b in (1, 2, 3)] == [0, 1, 2]
    assert [quad_pairing(2, 3), quad_pairing(1, 3), quad_pairing(1, 2)] == [0, 1, 2]
    assert quad_pairing(3, 2) == quad_pairing(2, 3)
    with pytest.raises(ValueError):
        quad_pairing(1, 1)
    assert invert((1, 2, 3, 0)) == (3, 0, 1, 2)


def test_skeleton_counts(single_tet, doubled_tet, folded_tet):
    assert compute_skeleton(single_tet).counts == (4, 6, 4, 1)
    assert compute_skeleton(doubled_tet).counts == (4, 6, 4, 2)
    s = compute_skeleton(folded_tet)
    assert s.counts[1] == 4
    # 12 -> 02 and 13 -> 03 under the fold
    assert s.edge_of[0][edge_index(1, 2)] == s.edge_of[0][edge_index(0, 2)]
    assert s.edge_of[0][edge_index(1, 3)] == s.edge_of[0][edge_index(0, 3)]
    assert sorted(len(members) for members in s.edge_classes) == [1, 1, 2, 2]


def test_boundary_components(single_tet, doubled_tet, chain_of_three):
    assert boundary_components(doubled_tet) == []
    assert boundary_components(single_tet) == [((0, 0), (0, 1), (0, 2), (0, 3))]
    assert boundary_euler_characteristic(single_tet, 0) == 2

    parts = boundary_components(chain_of_three)
    assert len(parts) == 1 and len(parts[0]) == 8
    assert boundary_euler_characteristic(chain_of_three, 0) == 2


def test_prism_boundary_is_two_spheres(sphere_prism):
    t = sphere_prism.triangulation
    parts = boundary_components(t)
    assert [len(part) for part in parts] == [4, 4]
    assert [boundary_euler_characteristic(t, k) for k in range(2)] == [2, 2]


def test_cone_single_tet(single_tet):
    coned = cone_boundary(single_tet, 0)
    assert coned.tet_count == 5
    assert coned.is_closed()
    assert compute_skeleton(coned).counts == (5, 10, 10, 5)
    assert not validate(coned)
    # apex tets see the base face through label 3
    assert coned.gluing(1, 3) == Gluing(0, (1, 2, 3, 0))


def test_cone_rejects_bad_component(single_tet, doubled_tet):
    with pytest.raises(BoundaryComponentError):
        cone_boundary(doubled_tet, 0)
    with pytest.raises(BoundaryComponentError):
        cone_boundary(single_tet, 1)


def test_cone_all_boundary(sphere_prism):
    closed = cone_all_boundary(sphere_prism.triangulation)
    assert closed.tet_count == 20
    assert closed.is_closed()
    coned_once = cone_boundary(sphere_prism.triangulation, 0)
    assert coned_once.tet_count == 16
    assert len(boundary_components(coned_once)) == 1


def test_tets_touching(chain_of_three):
    assert tets_touching(chain_of_three, frozenset({0})) == frozenset({0, 1})
    assert tets_touching(chain_of_three, frozenset({1})) == frozenset({0, 1, 2})
