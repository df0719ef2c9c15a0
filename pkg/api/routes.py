"""FastAPI routes for the normal surface toolkit."""

import logging

from fastapi import APIRouter, HTTPException
from datetime import datetime

from config import get_settings
from models.schemas import (
    AdmissibleResponse,
    BoundaryResponse,
    ClassifyResponse,
    ComponentModel,
    ComponentsResponse,
    ConeRequest,
    EnumerateRequest,
    EnumerateResponse,
    MapVectorRequest,
    OutsideRequest,
    PrismResponse,
    PrismVerifyRequest,
    RefineRequest,
    SampleResponse,
    SkeletonResponse,
    SurfaceRequest,
    SurfaceResponse,
    Theorem1Request,
    TriangulationRequest,
    TriangulationResponse,
    ValidationResponse,
    VectorRequest,
    VectorResponse,
    VerificationReport,
    WeightResponse,
    WeightsRequest,
)
from services.verification_service import get_verification_service
from topology.enumerator import EnumerationQuery, enumerate_admissible
from topology.errors import TopologyError
from topology.normal_coords import (
    admissibility_problems,
    components,
    parse_normal_vector,
    serialize_normal_vector,
    serialize_vector_blocks,
    weight,
)
from topology.prism_builder import build_prism, count_cyclic, orient_acyclic, parse_surface, serialize_surface
from topology.refinement import classify_pullback, push_forward, refine_scaled
from topology.samples import SAMPLES, sample_text
from topology.tri_core import (
    Triangulation,
    boundary_components,
    boundary_euler_characteristic,
    compute_skeleton,
    cone_boundary,
    parse_triangulation,
    serialize_triangulation,
    validate,
)

logger = logging.getLogger(__name__)

router = APIRouter()


def _bad_request(e: Exception) -> HTTPException:
    logger.info("Rejected request: %s", e)
    return HTTPException(status_code=400, detail=str(e))


def _parse(text: str) -> Triangulation:
    return parse_triangulation(text)


@router.post("/triangulations/validate", response_model=ValidationResponse)
async def validate_triangulation(request: TriangulationRequest):
    """
    Check a triangulation file.

    Format errors come back as a single issue carrying the line number.
    """
    try:
        t = parse_triangulation(request.triangulation, check=False)
        issues = [str(issue) for issue in validate(t)]
        return ValidationResponse(valid=not issues, issues=issues)
    except TopologyError as e:
        return ValidationResponse(valid=False, issues=[str(e)])
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/triangulations/skeleton", response_model=SkeletonResponse)
async def skeleton(request: TriangulationRequest):
    """Vertex, edge and face classes of a triangulation."""
    try:
        s = compute_skeleton(_parse(request.triangulation))
        v, e, f, t = s.counts
        return SkeletonResponse(
            vertices=v, edges=e, faces=f, tets=t,
            edge_degrees=[len(members) for members in s.edge_classes],
        )
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/triangulations/boundary", response_model=BoundaryResponse)
async def boundary(request: TriangulationRequest):
    """Boundary components and their Euler characteristics."""
    try:
        t = _parse(request.triangulation)
        parts = boundary_components(t)
        return BoundaryResponse(
            components=[[list(face) for face in part] for part in parts],
            euler_characteristics=[boundary_euler_characteristic(t, k) for k in range(len(parts))],
        )
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/triangulations/cone", response_model=TriangulationResponse)
async def cone(request: ConeRequest):
    """Close one boundary component by coning it to a new vertex."""
    try:
        coned = cone_boundary(_parse(request.triangulation), request.component)
        return TriangulationResponse(triangulation=serialize_triangulation(coned), tet_count=coned.tet_count)
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/triangulations/refine", response_model=TriangulationResponse)
async def refine(request: RefineRequest):
    """
    Scaled refinement.

    Give `scale` (one entry per tet) or `uniform` (same depth everywhere).
    """
    try:
        t = _parse(request.triangulation)
        if (request.scale is None) == (request.uniform is None):
            raise ValueError("give exactly one of 'scale' and 'uniform'")
        scale = request.scale if request.scale is not None else [request.uniform] * t.tet_count
        target, m = refine_scaled(t, scale)
        return TriangulationResponse(
            triangulation=serialize_triangulation(target),
            tet_count=target.tet_count,
            cone_vertices=len(m.cone_vertices),
        )
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/normal/admissible", response_model=AdmissibleResponse)
async def admissible(request: VectorRequest):
    """Admissibility check with the reasons a vector fails."""
    try:
        t = _parse(request.triangulation)
        problems = admissibility_problems(t, parse_normal_vector(request.vector, t.tet_count))
        return AdmissibleResponse(admissible=not problems, problems=problems)
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/normal/weight", response_model=WeightResponse)
async def normal_weight(request: VectorRequest):
    """PL-area (w1, w2) of an admissible vector."""
    try:
        t = _parse(request.triangulation)
        area = weight(t, parse_normal_vector(request.vector, t.tet_count))
        return WeightResponse(w1=area.w1, w2=area.w2)
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/normal/components", response_model=ComponentsResponse)
async def normal_components(request: VectorRequest):
    """Connected components with Euler characteristics."""
    try:
        t = _parse(request.triangulation)
        parts = components(t, parse_normal_vector(request.vector, t.tet_count))
        return ComponentsResponse(
            components=[
                ComponentModel(vector=serialize_normal_vector(p.vector), euler_characteristic=p.euler_characteristic)
                for p in parts
            ]
        )
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/normal/push", response_model=VectorResponse)
async def normal_push(request: MapVectorRequest):
    """Push a source vector through the refinement given by `scale`."""
    try:
        t = _parse(request.triangulation)
        _, m = refine_scaled(t, request.scale)
        pushed = push_forward(m, parse_normal_vector(request.vector, t.tet_count))
        return VectorResponse(vector=serialize_normal_vector(pushed))
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/normal/classify", response_model=ClassifyResponse)
async def normal_classify(request: MapVectorRequest):
    """Pull a refined vector back to the source of the refinement given by `scale`."""
    try:
        t = _parse(request.triangulation)
        target, m = refine_scaled(t, request.scale)
        back = classify_pullback(m, parse_normal_vector(request.vector, target.tet_count))
        return ClassifyResponse(
            source_vector=serialize_normal_vector(back.source_vector),
            sphere_counts=list(back.sphere_counts),
            uses_alternate=back.uses_alternate(),
        )
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/surfaces/orient", response_model=SurfaceResponse)
async def orient(request: SurfaceRequest):
    """Subdivide cyclic triangles until none is left."""
    try:
        s = parse_surface(request.surface)
        oriented = orient_acyclic(s)
        return SurfaceResponse(
            surface=serialize_surface(oriented),
            triangle_count=oriented.triangle_count,
            cyclic_before=count_cyclic(s),
        )
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/surfaces/prism", response_model=PrismResponse)
async def prism(request: SurfaceRequest):
    """Prism triangulation of F x I with its canonical F x {0} vector."""
    try:
        p = build_prism(parse_surface(request.surface))
        area = weight(p.triangulation, p.canonical)
        return PrismResponse(
            triangulation=serialize_triangulation(p.triangulation),
            tet_count=p.triangulation.tet_count,
            canonical=serialize_normal_vector(p.canonical),
            canonical_weight=WeightResponse(w1=area.w1, w2=area.w2),
        )
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/enumerate", response_model=EnumerateResponse)
async def enumerate_vectors(request: EnumerateRequest):
    """
    Every nonzero admissible vector within the weight cap, sorted.

    Returns 400 with the partial count when the enumeration budget is exceeded.
    """
    try:
        settings = get_settings()
        t = _parse(request.triangulation)
        query = EnumerationQuery(
            t,
            request.max_w1 or settings.default_max_w1,
            frozenset(request.support) if request.support is not None else None,
            request.closed_only,
        )
        vectors = enumerate_admissible(query, settings.max_results, settings.workers)
        return EnumerateResponse(count=len(vectors), vectors=serialize_vector_blocks(vectors))
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/verify/theorem1", response_model=VerificationReport)
async def verify_theorem1(request: Theorem1Request):
    """Refinement correspondence of normal vectors within the cap."""
    try:
        t = _parse(request.triangulation)
        cap = request.max_w1 or get_settings().default_max_w1
        return get_verification_service().verify_theorem1(t, request.scale, cap)
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/verify/weights", response_model=VerificationReport)
async def verify_weights(request: WeightsRequest):
    """Weight growth of every disk type."""
    try:
        return get_verification_service().verify_lemma_weights(request.depth)
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/verify/prism", response_model=VerificationReport)
async def verify_prism(request: PrismVerifyRequest):
    """Uniqueness of the closed connected surface inside the prism."""
    try:
        s = parse_surface(request.surface)
        cap = request.max_w1 or get_settings().default_max_w1
        return get_verification_service().verify_prism(s, cap)
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/verify/outside", response_model=VerificationReport)
async def verify_outside(request: OutsideRequest):
    """Light surfaces stay inside the prism once the exterior is refined."""
    try:
        settings = get_settings()
        p = build_prism(orient_acyclic(parse_surface(request.surface)))
        scale = request.scale if request.scale is not None else settings.default_scale
        cap = request.max_w1 or settings.default_max_w1
        return get_verification_service().verify_outside(p, scale, cap, request.exterior_only)
    except (TopologyError, ValueError) as e:
        raise _bad_request(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.get("/samples/{name}", response_model=SampleResponse)
async def get_sample(name: str):
    """
    Built-in instance in its file format.

    Path params:
    - name: one of single-tet, doubled-tet, tetrahedron-boundary, triangle, cyclic-triangle, two-triangles
    """
    if name not in SAMPLES:
        raise HTTPException(status_code=404, detail=f"unknown sample '{name}'")
    kind, text = sample_text(name)
    return SampleResponse(name=name, kind=kind, text=text)


@router.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "timestamp": datetime.now().isoformat()}
