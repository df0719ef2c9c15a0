"""Pydantic models for API requests/responses."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class TriangulationRequest(BaseModel):
    """A triangulation in the `tets N` text format."""
    triangulation: str = Field(..., description="Triangulation file contents")


class ConeRequest(TriangulationRequest):
    """Cone one boundary component."""
    component: int = Field(default=0, ge=0, description="Boundary component id, numbered by least face")


class RefineRequest(TriangulationRequest):
    """Scaled refinement; give either a per-tet scale or a uniform depth."""
    scale: Optional[List[int]] = Field(default=None, description="Refinement count per tet")
    uniform: Optional[int] = Field(default=None, ge=0, description="Same refinement count for every tet")


class VectorRequest(TriangulationRequest):
    """A normal vector on a triangulation."""
    vector: str = Field(..., description="Normal vector file: one line `t0 t1 t2 t3 q1 q2 q3` per tet")


class MapVectorRequest(VectorRequest):
    """A vector together with the refinement it travels through."""
    scale: List[int] = Field(..., description="Scaling function that rebuilds the refinement map")


class EnumerateRequest(TriangulationRequest):
    """Bounded enumeration of admissible vectors."""
    max_w1: Optional[int] = Field(default=None, ge=1, description="Weight cap; defaults to the server setting")
    closed_only: bool = Field(default=False, description="Discard vectors with arcs on boundary faces")
    support: Optional[List[int]] = Field(default=None, description="Tets allowed to carry disks")


class SurfaceRequest(BaseModel):
    """A surface triangulation in the `triangles N` text format."""
    surface: str = Field(..., description="Surface file contents")


class Theorem1Request(TriangulationRequest):
    scale: List[int] = Field(..., description="Scaling function")
    max_w1: Optional[int] = Field(default=None, ge=1)


class WeightsRequest(BaseModel):
    depth: int = Field(..., ge=0, description="Number of full refinements")


class PrismVerifyRequest(SurfaceRequest):
    max_w1: Optional[int] = Field(default=None, ge=1)


class OutsideRequest(SurfaceRequest):
    scale: Optional[int] = Field(default=None, ge=0, description="Refinement depth of the cone tets")
    max_w1: Optional[int] = Field(default=None, ge=1)
    exterior_only: bool = Field(default=False, description="Restrict the search to tets outside the prism")


class ValidationResponse(BaseModel):
    valid: bool
    issues: List[str]


class SkeletonResponse(BaseModel):
    """Class counts (V, E, F, T) and class sizes."""
    vertices: int
    edges: int
    faces: int
    tets: int
    edge_degrees: List[int] = Field(..., description="Incidences per edge class")


class BoundaryResponse(BaseModel):
    components: List[List[List[int]]] = Field(..., description="Boundary faces as [tet, face] pairs")
    euler_characteristics: List[int]


class TriangulationResponse(BaseModel):
    triangulation: str
    tet_count: int
    cone_vertices: int = 0


class AdmissibleResponse(BaseModel):
    admissible: bool
    problems: List[str]


class WeightResponse(BaseModel):
    """PL-area (w1, w2)."""
    w1: int
    w2: int


class ComponentModel(BaseModel):
    vector: str
    euler_characteristic: int


class ComponentsResponse(BaseModel):
    components: List[ComponentModel]


class VectorResponse(BaseModel):
    vector: str


class ClassifyResponse(BaseModel):
    source_vector: str
    sphere_counts: List[int] = Field(..., description="Link components per cone vertex")
    uses_alternate: bool


class SurfaceResponse(BaseModel):
    surface: str
    triangle_count: int
    cyclic_before: int


class PrismResponse(BaseModel):
    triangulation: str
    tet_count: int
    canonical: str
    canonical_weight: WeightResponse


class EnumerateResponse(BaseModel):
    count: int
    vectors: str = Field(..., description="`count K` header then blank-line separated vector blocks")


class SampleResponse(BaseModel):
    name: str
    kind: str
    text: str


class VerificationReport(BaseModel):
    """Outcome of one verification scenario; field order is the rendering order."""
    scenario: str
    parameters: Dict[str, Any]
    instance: Dict[str, Any]
    passed: bool
    details: List[str] = Field(default_factory=list)
    counterexample: Optional[Dict[str, Any]] = None
    notes: List[str] = Field(default_factory=list)
    elapsed_seconds: float = 0.0

    @model_validator(mode="after")
    def _failure_has_counterexample(self):
        if not self.passed and self.counterexample is None:
            raise ValueError("a failing report must carry a counterexample")
        return self

    def render(self, include_timing: bool = True) -> str:
        def pairs(values: Dict[str, Any]) -> str:
            return " ".join(f"{key}={value}" for key, value in values.items())

        lines = [
            f"scenario: {self.scenario}",
            f"parameters: {pairs(self.parameters)}",
            f"instance: {pairs(self.instance)}",
            f"passed: {'yes' if self.passed else 'no'}",
            "details:",
        ]
        lines.extend(f"  {line}" for line in self.details)
        if self.counterexample is None:
            lines.append("counterexample: none")
        else:
            lines.append("counterexample:")
            lines.extend(f"  {key}: {value}" for key, value in self.counterexample.items())
        lines.append("notes:")
        lines.extend(f"  {note}" for note in self.notes)
        if include_timing:
            lines.append(f"elapsed_seconds: {self.elapsed_seconds}")
        return "\n".join(lines) + "\n"
