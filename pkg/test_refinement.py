"""Tests for the cone refinement, local patterns and coordinate transport."""

import pytest

from topology.errors import InadmissibleVectorError, ScalingFunctionError
from topology.normal_coords import (
    add_vectors,
    components,
    is_admissible,
    is_vertex_linking,
    vertex_link,
    weight,
    zero_vector,
)
from topology.refinement import (
    CONE_SLOT,
    PATTERN_LOOKUP,
    PATTERNS,
    Descendant,
    Pattern,
    WeightGrowth,
    child_label,
    classify_pullback,
    cone_vertex_link,
    descendants,
    local_refinement,
    parse_scaling,
    pattern_vector,
    push_forward,
    realize,
    refine_once,
    refine_scaled,
    serialize_scaling,
    weight_growth,
)
from topology.tri_core import compute_skeleton, validate


def unit(slot, tets=1, tet=0):
    v = [0] * (7 * tets)
    v[7 * tet + slot] = 1
    return tuple(v)


def test_child_labels():
    assert [child_label(0, v) for v in (1, 2, 3)] == [0, 1, 2]
    assert [child_label(2, v) for v in (0, 1, 3)] == [0, 1, 2]
    with pytest.raises(ValueError):
        child_label(1, 1)


def test_refine_once_counts(single_tet):
    target, m = refine_once(single_tet, [0])
    assert target.tet_count == 4
    assert compute_skeleton(target).counts == (5, 10, 10, 4)
    assert not validate(target)
    assert m.rounds == 1
    assert m.cone_vertices[0].children == (0, 1, 2, 3)
    assert descendants(m, 0)[0] == Descendant(0, (1, 2, 3, 4))
    assert descendants(m, 0)[3] == Descendant(3, (0, 1, 2, 4))


def test_twice_refined_counts(single_tet):
    target, m = refine_scaled(single_tet, (2,))
    assert compute_skeleton(target).counts == (9, 26, 34, 16)
    assert len(m.cone_vertices) == 5
    assert m.descendant_tets([0]) == frozenset(range(16))


@pytest.mark.parametrize("n", range(6))
def test_scaled_tet_count(single_tet, n):
    target, m = refine_scaled(single_tet, (n,))
    assert target.tet_count == 4 ** n
    assert m.rounds == n


def test_partial_refinement_copies_the_rest(chain_of_three):
    target, m = refine_scaled(chain_of_three, (1, 0, 0))
    assert target.tet_count == 6
    assert m.steps[0].image_start == (0, 4, 5)
    assert descendants(m, 1) == (Descendant(4, (0, 1, 2, 3)),)
    assert len(target.boundary_faces()) == len(chain_of_three.boundary_faces())


def test_scaling_errors(single_tet, doubled_tet):
    with pytest.raises(ScalingFunctionError):
        refine_scaled(doubled_tet, (1,))
    with pytest.raises(ScalingFunctionError):
        refine_scaled(single_tet, (-1,))
    with pytest.raises(ScalingFunctionError):
        refine_once(single_tet, [1])
    with pytest.raises(ScalingFunctionError):
        parse_scaling("1 x")
    with pytest.raises(ScalingFunctionError):
        parse_scaling("1 2", tet_count=1)
    assert parse_scaling(serialize_scaling((2, 0, 1))) == (2, 0, 1)


def test_pattern_table():
    assert len(PATTERNS) == 15
    assert len(PATTERN_LOOKUP) == 15
    local = local_refinement().target
    for pattern in PATTERNS:
        v = pattern_vector(pattern)
        assert is_admissible(local, v), pattern
        assert len(components(local, v)) == 1, pattern


def test_alternate_triangle_pattern():
    alternate = pattern_vector(Pattern(0, 2))
    expected = [0] * 28
    for index in (3, 13, 20, 27):
        expected[index] = 1
    assert alternate == tuple(expected)

    local = local_refinement().target
    assert weight(local, pattern_vector(Pattern(0, 1))).w1 == 4
    assert weight(local, alternate).w1 == 6
    for slot in (4, 5, 6):
        assert weight(local, pattern_vector(Pattern(slot, 1))).w1 == 6
        assert weight(local, pattern_vector(Pattern(slot, 2))).w1 == 6


def test_weight_growth_triangle():
    growth = weight_growth(0, 4)
    assert growth == WeightGrowth(0, (3, 4, 7, 16, 43), (1, 3, 9, 27, 81))


@pytest.mark.parametrize("slot", [4, 5, 6])
def test_weight_growth_quad(slot):
    assert weight_growth(slot, 1) == WeightGrowth(slot, (4, 6), (1, 4))


def test_weight_growth_every_slot():
    for slot in range(7):
        growth = weight_growth(slot, 3)
        assert all(w > i for i, w in enumerate(growth.weights))
    with pytest.raises(ValueError):
        weight_growth(7, 1)


def test_push_forward_vertex_link(doubled_tet):
    target, m = refine_scaled(doubled_tet, (1, 1))
    link = vertex_link(doubled_tet, 0)
    pushed = push_forward(m, link)
    assert is_admissible(target, pushed)
    assert weight(target, pushed).w1 == 5
    # child 1 keeps parent vertex 0 at label 0
    cls = compute_skeleton(target).vertex_of[1][0]
    assert is_vertex_linking(target, pushed, cls)

    back = classify_pullback(m, pushed)
    assert back.source_vector == link
    assert back.sphere_counts == (0, 0)
    assert not back.uses_alternate()
    assert realize(m, back) == pushed


def test_push_forward_requires_admissible(doubled_tet):
    _, m = refine_scaled(doubled_tet, (1, 1))
    with pytest.raises(InadmissibleVectorError):
        push_forward(m, unit(0, tets=2))


def test_cone_vertex_spheres(single_tet):
    target, m = refine_scaled(single_tet, (1,))
    link = cone_vertex_link(m, 0)
    assert link == pattern_vector(Pattern(CONE_SLOT, 0))

    v = add_vectors(push_forward(m, unit(1)), link)
    back = classify_pullback(m, v)
    assert back.source_vector == unit(1)
    assert back.sphere_counts == (1,)
    assert realize(m, back) == v


def test_cone_vertex_spheres_survive_later_rounds(single_tet):
    target, m = refine_scaled(single_tet, (2,))
    back = classify_pullback(m, cone_vertex_link(m, 0))
    assert back.source_vector == zero_vector(1)
    assert back.sphere_counts == (1, 0, 0, 0, 0)


def test_classify_alternate_pattern(single_tet):
    target, m = refine_scaled(single_tet, (1,))
    alternate = pattern_vector(Pattern(0, 2))
    back = classify_pullback(m, alternate)
    assert back.source_vector == unit(0)
    assert back.sphere_total == 0
    assert back.uses_alternate()
    assert realize(m, back) == alternate
    canonical = push_forward(m, back.source_vector)
    assert weight(target, canonical) < weight(target, alternate)
