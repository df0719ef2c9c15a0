"""Theorem-level verification scenarios at desk scale."""

import pytest
from pydantic import ValidationError

import services.verification_service as verification_module
from models.schemas import VerificationReport
from services.verification_service import VerificationService, get_verification_service
from topology.enumerator import EnumerationQuery, enumerate_admissible, enumerate_naive
from topology.normal_coords import is_admissible, serialize_vector_blocks
from topology.prism_builder import build_prism
from topology.refinement import classify_pullback, push_forward, realize, refine_scaled
from topology.samples import single_tetrahedron, single_triangle, tetrahedron_boundary


@pytest.fixture
def service():
    return VerificationService(max_results=500_000, workers=1)


def test_singleton():
    assert get_verification_service() is get_verification_service()


def test_failing_report_needs_counterexample():
    with pytest.raises(ValidationError):
        VerificationReport(scenario="x", parameters={}, instance={}, passed=False)
    report = VerificationReport(
        scenario="x", parameters={"a": 1}, instance={}, passed=False, counterexample={"reason": "r"}
    )
    assert "counterexample:\n  reason: r\n" in report.render()


def test_weight_growth_report(service):
    report = service.verify_lemma_weights(4)
    assert report.passed
    assert "t0: w=(3, 4, 7, 16, 43) d=(1, 3, 9, 27, 81)" in report.details
    text = report.render(include_timing=False)
    assert text.startswith("scenario: weights\nparameters: depth=4\n")
    assert "elapsed_seconds" not in text


def test_reports_are_deterministic(service):
    first = service.verify_lemma_weights(2).render(include_timing=False)
    second = service.verify_lemma_weights(2).render(include_timing=False)
    assert first == second


@pytest.mark.parametrize(
    "scenario",
    [
        lambda s: s.verify_theorem1(single_tetrahedron(), (1,), 4),
        lambda s: s.verify_prism(tetrahedron_boundary(), 9),
        lambda s: s.verify_outside(build_prism(tetrahedron_boundary()), 1, 6),
        lambda s: s.verify_outside(build_prism(tetrahedron_boundary()), 1, 6, exterior_only=True),
    ],
    ids=["theorem1", "prism", "outside", "outside-exterior-only"],
)
def test_scenario_reports_are_byte_identical(scenario):
    renders = [
        scenario(VerificationService(max_results=500_000, workers=workers)).render(include_timing=False)
        for workers in (1, 1, 2)
    ]
    assert renders[0] == renders[1] == renders[2]
    assert "passed: yes" in renders[0]


def test_enumeration_output_is_byte_identical(chain_of_three):
    q = EnumerationQuery(chain_of_three, 6, frozenset({0, 2}))
    outputs = [serialize_vector_blocks(enumerate_admissible(q, workers=workers)) for workers in (1, 1, 2)]
    assert outputs[0] == outputs[1] == outputs[2]
    assert outputs[0] == serialize_vector_blocks(enumerate_naive(q))


def _flatten(payload):
    return tuple(x for row in payload for x in row)


def test_push_failure_payload_rechecks(service, single_tet, monkeypatch):
    def broken_push(m, v):
        pushed = list(push_forward(m, v))
        pushed[0] += 1
        return tuple(pushed)

    monkeypatch.setattr(verification_module, "push_forward", broken_push)
    report = service.verify_theorem1(single_tet, (1,), 4)
    assert not report.passed
    assert report.counterexample["reason"] == "push-forward is not admissible"

    source = _flatten(report.counterexample["source"])
    target, m = refine_scaled(single_tet, (1,))
    assert is_admissible(single_tet, source)
    assert not is_admissible(target, broken_push(m, source))
    assert "counterexample:\n  reason: push-forward is not admissible\n" in report.render()


def test_round_trip_failure_payload_rechecks(service, single_tet, monkeypatch):
    def broken_realize(m, pullback):
        return (0,) * (7 * m.target.tet_count)

    monkeypatch.setattr(verification_module, "realize", broken_realize)
    report = service.verify_theorem1(single_tet, (1,), 4)
    assert not report.passed
    assert report.counterexample["reason"] == "round trip is not exact"

    target_vector = _flatten(report.counterexample["target"])
    target, m = refine_scaled(single_tet, (1,))
    assert is_admissible(target, target_vector)
    back = classify_pullback(m, target_vector)
    assert realize(m, back) == target_vector
    assert broken_realize(m, back) != target_vector
    assert _flatten(report.counterexample["rebuilt"]) == broken_realize(m, back)


def test_refinement_correspondence_single_tet(service, single_tet):
    report = service.verify_theorem1(single_tet, (1,), 6)
    assert report.passed, report.counterexample
    assert "source vectors: 17" in report.details
    assert report.instance == {"source_tets": 1, "target_tets": 4, "cone_vertices": 1}


def test_refinement_correspondence_doubled_tet(service, doubled_tet):
    report = service.verify_theorem1(doubled_tet, (1, 1), 6)
    assert report.passed, report.counterexample
    assert report.instance["target_tets"] == 8


@pytest.mark.slow
def test_refinement_correspondence_twice_refined(service, single_tet):
    report = service.verify_theorem1(single_tet, (2,), 6)
    assert report.passed, report.counterexample


def test_prism_uniqueness_at_canonical_weight(service):
    report = service.verify_prism(tetrahedron_boundary(), 10)
    assert report.passed, report.counterexample
    assert report.instance["prism_tets"] == 12
    assert report.instance["canonical_weight"] == "(10, 20)"
    assert "connected closed vectors: 1" in report.details
    assert "canonical chain agrees in every block: True" in report.details


def test_prism_below_canonical_weight(service):
    report = service.verify_prism(tetrahedron_boundary(), 9)
    assert report.passed
    assert "connected closed vectors: 0" in report.details


@pytest.mark.slow
def test_prism_uniqueness_full_cap(service):
    report = service.verify_prism(tetrahedron_boundary(), 14)
    assert report.passed, report.counterexample
    assert "connected closed vectors: 1" in report.details


def test_prism_over_open_surface(service):
    report = service.verify_prism(single_triangle(cyclic=True), 6)
    assert report.passed
    assert report.instance["subdivided_cyclic_triangles"] == 1
    assert report.instance["prism_tets"] == 9
    assert report.notes == ["surface has boundary; no closed surface is expected"]


def test_light_surfaces_stay_in_prism(service, sphere_prism):
    report = service.verify_outside(sphere_prism, 1, 6)
    assert report.passed, report.counterexample
    assert report.instance["tets"] == 44
    assert "effective cap: 1" in report.details


def test_outside_vacuous_at_scale_zero(service, sphere_prism):
    report = service.verify_outside(sphere_prism, 0, 6)
    assert report.passed
    assert report.details == ["vacuous: cap below 1"]


@pytest.mark.slow
def test_light_surfaces_stay_in_prism_scale_two(service, sphere_prism):
    report = service.verify_outside(sphere_prism, 2, 6)
    assert report.passed, report.counterexample
    assert report.instance["tets"] == 140
