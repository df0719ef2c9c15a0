"""Verification harness: property checks of the refinement, weight and prism results at fixed scale."""

import logging
import time
from typing import Any, Dict, List, Optional, Sequence

from config import get_settings
from models.schemas import VerificationReport
from topology.enumerator import EnumerationQuery, enumerate_admissible, enumerate_connected
from topology.errors import NotParentNormalError, WeightGrowthError
from topology.normal_coords import (
    SLOT_NAMES,
    add_vectors,
    is_admissible,
    supported_in,
    weight,
)
from topology.prism_builder import (
    PrismComplex,
    SurfaceTriangulation,
    block_profile,
    build_heavy_exterior,
    build_prism,
    count_cyclic,
    orient_acyclic,
)
from topology.refinement import (
    classify_pullback,
    cone_vertex_link,
    push_forward,
    realize,
    refine_scaled,
    weight_growth,
)
from topology.tri_core import Triangulation

logger = logging.getLogger(__name__)


def _vector_payload(v: Sequence[int]) -> List[List[int]]:
    return [list(v[i:i + 7]) for i in range(0, len(v), 7)]


class VerificationService:
    """Run the theorem-level checks and package the outcome as reports."""

    def __init__(self, max_results: int = 500_000, workers: int = 1):
        self.max_results = max_results
        self.workers = workers

    def _enumerate(self, query: EnumerationQuery) -> List[tuple]:
        return enumerate_admissible(query, self.max_results, self.workers)

    def _report(
        self,
        scenario: str,
        parameters: Dict[str, Any],
        instance: Dict[str, Any],
        details: List[str],
        started: float,
        counterexample: Optional[Dict[str, Any]] = None,
        notes: Optional[List[str]] = None,
    ) -> VerificationReport:
        report = VerificationReport(
            scenario=scenario,
            parameters=parameters,
            instance=instance,
            passed=counterexample is None,
            details=details,
            counterexample=counterexample,
            notes=notes or [],
            elapsed_seconds=round(time.perf_counter() - started, 3),
        )
        logger.info(
            "%s: %s (%.3fs)", scenario, "pass" if report.passed else "FAIL", report.elapsed_seconds
        )
        return report

    def verify_theorem1(self, t: Triangulation, f: Sequence[int], max_w1: int) -> VerificationReport:
        """Check that normal vectors within the cap correspond across refine_scaled(t, f).

        Every source vector must push forward admissibly and classify back to
        itself. Every target vector must classify into a source vector plus
        cone-vertex spheres, be rebuilt exactly by ``realize``, and weigh no
        less than its canonical reconstruction.
        """
        started = time.perf_counter()
        target, m = refine_scaled(t, f)
        parameters = {"max_w1": max_w1, "scale": list(f)}
        instance = {
            "source_tets": t.tet_count,
            "target_tets": target.tet_count,
            "cone_vertices": len(m.cone_vertices),
        }

        sources = self._enumerate(EnumerationQuery(t, max_w1))
        for v in sources:
            pushed = push_forward(m, v)
            if not is_admissible(target, pushed):
                return self._report(
                    "theorem1", parameters, instance, [f"source vectors: {len(sources)}"], started,
                    {"reason": "push-forward is not admissible", "source": _vector_payload(v)},
                )
            back = classify_pullback(m, pushed)
            if back.source_vector != tuple(v) or back.sphere_total:
                return self._report(
                    "theorem1", parameters, instance, [f"source vectors: {len(sources)}"], started,
                    {
                        "reason": "push-forward does not classify back to its source",
                        "source": _vector_payload(v),
                        "classified": _vector_payload(back.source_vector),
                        "spheres": list(back.sphere_counts),
                    },
                )

        targets = self._enumerate(EnumerationQuery(target, max_w1))
        with_spheres = 0
        alternate = 0
        for v in targets:
            try:
                back = classify_pullback(m, v)
            except NotParentNormalError as e:
                return self._report(
                    "theorem1", parameters, instance, [f"target vectors: {len(targets)}"], started,
                    {"reason": str(e), "target": _vector_payload(v), "piece": e.piece},
                )
            rebuilt = realize(m, back)
            canonical = push_forward(m, back.source_vector)
            for k, count in enumerate(back.sphere_counts):
                for _ in range(count):
                    canonical = add_vectors(canonical, cone_vertex_link(m, k))
            if rebuilt != tuple(v) or weight(target, canonical) > weight(target, v):
                return self._report(
                    "theorem1", parameters, instance, [f"target vectors: {len(targets)}"], started,
                    {
                        "reason": "round trip is not exact",
                        "target": _vector_payload(v),
                        "rebuilt": _vector_payload(rebuilt),
                        "canonical_weight": str(weight(target, canonical)),
                        "weight": str(weight(target, v)),
                    },
                )
            with_spheres += bool(back.sphere_total)
            alternate += back.uses_alternate()

        details = [
            f"source vectors: {len(sources)}",
            f"target vectors: {len(targets)}",
            f"target vectors with cone-vertex spheres: {with_spheres}",
            f"target vectors using an alternate pattern: {alternate}",
        ]
        return self._report("theorem1", parameters, instance, details, started)

    def verify_lemma_weights(self, n: int) -> VerificationReport:
        """Weight growth of all seven disk types under ``n`` full refinements."""
        started = time.perf_counter()
        details = []
        for slot in range(7):
            try:
                growth = weight_growth(slot, n)
            except WeightGrowthError as e:
                return self._report(
                    "weights", {"depth": n}, {"disk_types": 7}, details, started,
                    {"reason": str(e), "disk": SLOT_NAMES[e.disk], "step": e.index},
                )
            details.append(f"{SLOT_NAMES[slot]}: w={growth.weights} d={growth.disk_counts}")
        return self._report("weights", {"depth": n}, {"disk_types": 7}, details, started)

    def verify_prism(self, s: SurfaceTriangulation, max_w1: int) -> VerificationReport:
        """Every connected closed vector on the prism within the cap must be the canonical F x {0}."""
        started = time.perf_counter()
        cyclic = count_cyclic(s)
        oriented = orient_acyclic(s)
        p = build_prism(oriented)
        canonical_weight = weight(p.triangulation, p.canonical)
        closed_surface = oriented.is_closed()
        parameters = {"max_w1": max_w1}
        instance = {
            "triangles": oriented.triangle_count,
            "subdivided_cyclic_triangles": cyclic,
            "prism_tets": p.triangulation.tet_count,
            "canonical_weight": str(canonical_weight),
        }
        notes = [] if closed_surface else ["surface has boundary; no closed surface is expected"]

        found = enumerate_connected(
            EnumerationQuery(p.triangulation, max_w1, p.prism_tets, closed_only=True),
            self.max_results, self.workers,
        )
        for v, chi in found:
            if v != p.canonical:
                return self._report(
                    "prism", parameters, instance, [f"connected closed vectors: {len(found)}"], started,
                    {"reason": "connected closed vector differs from F x {0}", "vector": _vector_payload(v),
                     "euler_characteristic": chi, "weight": str(weight(p.triangulation, v))},
                    notes,
                )

        expected = closed_surface and canonical_weight.w1 <= max_w1
        if expected and not found:
            return self._report(
                "prism", parameters, instance, ["connected closed vectors: 0"], started,
                {"reason": "canonical F x {0} missing from the enumeration",
                 "vector": _vector_payload(p.canonical)},
                notes,
            )
        chains = block_profile(p, p.canonical)
        details = [
            f"connected closed vectors: {len(found)}",
            f"canonical chain agrees in every block: {all(c == chains[0] for c in chains)}",
        ]
        return self._report("prism", parameters, instance, details, started, None, notes)

    def verify_outside(
        self,
        p: PrismComplex,
        n: int,
        max_w1: int,
        exterior_only: bool = False,
    ) -> VerificationReport:
        """No admissible vector of weight at most min(cap, n) reaches outside the prism."""
        started = time.perf_counter()
        exterior = build_heavy_exterior(p, n)
        cap = min(max_w1, n)
        t = exterior.triangulation
        outside = frozenset(range(t.tet_count)) - exterior.prism_tets
        parameters = {"scale": n, "max_w1": max_w1, "exterior_only": exterior_only}
        instance = {
            "tets": t.tet_count,
            "prism_tets": len(exterior.prism_tets),
            "cone_tets": exterior.cone_tets,
        }
        notes = ["exterior closed by coning each boundary sphere"]
        if cap < 1:
            return self._report("outside", parameters, instance, ["vacuous: cap below 1"], started, None, notes)

        support = outside if exterior_only else None
        vectors = self._enumerate(EnumerationQuery(t, cap, support))
        for v in vectors:
            if not supported_in(t, v, exterior.prism_tets):
                return self._report(
                    "outside", parameters, instance, [f"vectors within cap: {len(vectors)}"], started,
                    {"reason": "vector leaves the prism", "vector": _vector_payload(v),
                     "weight": str(weight(t, v))},
                    notes,
                )
        details = [f"effective cap: {cap}", f"vectors within cap: {len(vectors)}"]
        return self._report("outside", parameters, instance, details, started, None, notes)


# Singleton instance
_verification_service = None


def get_verification_service() -> VerificationService:
    """Get or create the verification service singleton."""
    global _verification_service
    if _verification_service is None:
        settings = get_settings()
        _verification_service = VerificationService(settings.max_results, settings.workers)
    return _verification_service

