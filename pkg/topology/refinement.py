"""The 1-to-4 cone refinement, scaled refinements, and transport of normal coordinates."""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import NotParentNormalError, ScalingFunctionError, WeightGrowthError
from .normal_coords import (
    SLOTS,
    NormalVector,
    admissibility_problems,
    as_matrix,
    components,
    require_admissible,
    weight,
)
from .tri_core import QUADS, Perm, Triangulation, build_triangulation, quad_pairing

logger = logging.getLogger(__name__)

# Child label 3 is always the cone vertex.
CONE_LABEL = 3
CONE_SLOT = 7


def child_label(child: int, vertex: int) -> int:
    """Label of parent vertex ``vertex`` inside child ``child`` (which omits ``child``)."""
    if vertex == child:
        raise ValueError(f"child {child} does not contain parent vertex {vertex}")
    return vertex if vertex < child else vertex - 1


def child_vertices(child: int) -> Tuple[int, int, int]:
    """Parent vertices carried by child labels 0..2."""
    return tuple(v for v in range(4) if v != child)


@dataclass(frozen=True)
class RefinementStep:
    """One round of refine_once.

    ``image_start[s]`` is the copy of unrefined source tet ``s``, or the first
    of the four consecutive children of a refined one.
    """
    source: Triangulation
    target: Triangulation
    refined: FrozenSet[int]
    image_start: Tuple[int, ...]

    def children(self, tet: int) -> Tuple[int, ...]:
        start = self.image_start[tet]
        if tet in self.refined:
            return tuple(range(start, start + 4))
        return (start,)


class ConeVertex(NamedTuple):
    round: int
    tet: int
    children: Tuple[int, int, int, int]


class Descendant(NamedTuple):
    """A final target tet and its labels: 0..3 are source vertices, 4 + k is cone vertex k."""
    tet: int
    labels: Tuple[int, int, int, int]


@dataclass(frozen=True)
class RefinementMap:
    source: Triangulation
    target: Triangulation
    steps: Tuple[RefinementStep, ...]
    cone_vertices: Tuple[ConeVertex, ...]
    descendants: Tuple[Tuple[Descendant, ...], ...]

    @property
    def rounds(self) -> int:
        return len(self.steps)

    def descendant_tets(self, tets: Iterable[int]) -> FrozenSet[int]:
        return frozenset(d.tet for s in tets for d in self.descendants[s])


def _refine_step(t: Triangulation, selected: FrozenSet[int]) -> RefinementStep:
    image_start: List[int] = []
    next_index = 0
    for tet in range(t.tet_count):
        image_start.append(next_index)
        next_index += 4 if tet in selected else 1

    def host(tet: int, face: int) -> Tuple[int, int, Dict[int, int]]:
        """Target tet holding source face (tet, face), its face index and label map."""
        if tet in selected:
            return (
                image_start[tet] + face,
                CONE_LABEL,
                {v: child_label(face, v) for v in child_vertices(face)},
            )
        return image_start[tet], face, {v: v for v in range(4) if v != face}

    rows: List[List[Optional[Tuple[int, Perm]]]] = [[None] * 4 for _ in range(next_index)]
    for tet in range(t.tet_count):
        for face in range(4):
            glue = t.gluings[tet][face]
            if glue is None:
                continue
            here, here_face, here_labels = host(tet, face)
            there, there_face, there_labels = host(glue.tet, glue.perm[face])
            sigma = [0, 0, 0, 0]
            sigma[here_face] = there_face
            for v, label in here_labels.items():
                sigma[label] = there_labels[glue.perm[v]]
            rows[here][here_face] = (there, tuple(sigma))

    for tet in sorted(selected):
        start = image_start[tet]
        for x in range(4):
            for y in range(x + 1, 4):
                face_x = child_label(x, y)
                face_y = child_label(y, x)
                sigma = [0, 0, 0, 0]
                sigma[CONE_LABEL] = CONE_LABEL
                sigma[face_x] = face_y
                for v in range(4):
                    if v not in (x, y):
                        sigma[child_label(x, v)] = child_label(y, v)
                rows[start + x][face_x] = (start + y, tuple(sigma))
                inverse = [0, 0, 0, 0]
                for k, image in enumerate(sigma):
                    inverse[image] = k
                rows[start + y][face_y] = (start + x, tuple(inverse))

    return RefinementStep(t, build_triangulation(rows), frozenset(selected), tuple(image_start))


def _identity_descendants(t: Triangulation) -> Tuple[Tuple[Descendant, ...], ...]:
    return tuple((Descendant(tet, (0, 1, 2, 3)),) for tet in range(t.tet_count))


def _compose(
    m: RefinementMap, step: RefinementStep
) -> RefinementMap:
    cone_index: Dict[int, int] = {}
    cones = list(m.cone_vertices)
    for tet in sorted(step.refined):
        cone_index[tet] = len(cones)
        cones.append(ConeVertex(len(m.steps), tet, step.children(tet)))

    descendants = []
    for family in m.descendants:
        refined_family: List[Descendant] = []
        for d in family:
            if d.tet not in step.refined:
                refined_family.append(Descendant(step.image_start[d.tet], d.labels))
                continue
            for x in range(4):
                labels = tuple(d.labels[v] for v in child_vertices(x)) + (4 + cone_index[d.tet],)
                refined_family.append(Descendant(step.image_start[d.tet] + x, labels))
        descendants.append(tuple(refined_family))

    return RefinementMap(
        m.source, step.target, m.steps + (step,), tuple(cones), tuple(descendants)
    )


def identity_map(t: Triangulation) -> RefinementMap:
    return RefinementMap(t, t, (), (), _identity_descendants(t))


def _check_selection(t: Triangulation, tets: Iterable[int]) -> FrozenSet[int]:
    selected = frozenset(int(tet) for tet in tets)
    bad = sorted(tet for tet in selected if not 0 <= tet < t.tet_count)
    if bad:
        raise ScalingFunctionError(f"tet indices out of range for {t.tet_count} tets: {bad}")
    return selected


def refine_once(t: Triangulation, tets: Iterable[int]) -> Tuple[Triangulation, RefinementMap]:
    """Cone each selected tetrahedron to a new interior vertex, splitting it into four."""
    selected = _check_selection(t, tets)
    step = _refine_step(t, selected)
    m = _compose(identity_map(t), step)
    logger.debug("Refined %d of %d tets -> %d tets", len(selected), t.tet_count, step.target.tet_count)
    return m.target, m


def refine_scaled(t: Triangulation, f: Sequence[int]) -> Tuple[Triangulation, RefinementMap]:
    """Refine each tet ``f[tet]`` times; descendants of a refined tet inherit its remaining budget."""
    if len(f) != t.tet_count:
        raise ScalingFunctionError(f"scaling function has {len(f)} entries, triangulation has {t.tet_count} tets")
    if any(int(x) < 0 for x in f):
        raise ScalingFunctionError("scaling function entries must be non-negative")

    m = identity_map(t)
    budget = [int(x) for x in f]
    current = t
    while any(budget):
        selected = frozenset(tet for tet, b in enumerate(budget) if b > 0)
        step = _refine_step(current, selected)
        next_budget = [0] * step.target.tet_count
        for tet, b in enumerate(budget):
            for child in step.children(tet):
                next_budget[child] = b - 1 if tet in selected else b
        m = _compose(m, step)
        logger.info(
            "Refinement round %d: %d tets refined, %d -> %d tets",
            m.rounds, len(selected), current.tet_count, step.target.tet_count,
        )
        current, budget = step.target, next_budget
    return current, m


def parse_scaling(text: str, tet_count: Optional[int] = None) -> Tuple[int, ...]:
    values = []
    for token in text.split():
        if not token.isdigit():
            raise ScalingFunctionError(f"scaling entry {token!r} is not a non-negative integer")
        values.append(int(token))
    if tet_count is not None and len(values) != tet_count:
        raise ScalingFunctionError(f"scaling function has {len(values)} entries, triangulation has {tet_count} tets")
    return tuple(values)


def serialize_scaling(f: Sequence[int]) -> str:
    return " ".join(str(int(x)) for x in f) + "\n"


class Pattern(NamedTuple):
    """A local picture inside the four children of one refined tet.

    ``slot`` 0..6 is the parent disk type and 7 the link of the cone vertex;
    ``variant`` 1 is the canonical push-forward and 2 the alternate position.
    """
    slot: int
    variant: int


def _unit(child: int, slot: int) -> Tuple[int, int]:
    return (SLOTS * child + slot, 1)


def _pattern_entries(pattern: Pattern) -> List[Tuple[int, int]]:
    slot, variant = pattern
    if slot == CONE_SLOT:
        return [_unit(x, CONE_LABEL) for x in range(4)]

    if slot < 4:
        w = slot
        if variant == 1:
            return [_unit(x, child_label(x, w)) for x in range(4) if x != w]
        entries = [
            _unit(x, 4 + quad_pairing(child_label(x, w), CONE_LABEL)) for x in range(4) if x != w
        ]
        entries.append(_unit(w, CONE_LABEL))
        return entries

    first, second = QUADS[slot - 4]
    near, far = (first, second) if variant == 1 else (second, first)
    x, y = near
    entries = [_unit(x, child_label(x, y)), _unit(y, child_label(y, x))]
    for z in far:
        entries.append(_unit(z, 4 + quad_pairing(child_label(z, x), child_label(z, y))))
    return entries


def pattern_vector(pattern: Pattern) -> NormalVector:
    """Coordinates of ``pattern`` on the four children, child X at offset 7 * X."""
    vector = [0] * (4 * SLOTS)
    for index, count in _pattern_entries(pattern):
        vector[index] += count
    return tuple(vector)


PATTERNS: Tuple[Pattern, ...] = tuple(
    Pattern(slot, variant) for slot in range(SLOTS) for variant in (1, 2)
) + (Pattern(CONE_SLOT, 0),)

PATTERN_LOOKUP: Dict[NormalVector, Pattern] = {pattern_vector(p): p for p in PATTERNS}


@lru_cache(maxsize=1)
def local_refinement() -> RefinementStep:
    """The four children of a single free tetrahedron, glued only to each other."""
    free = Triangulation(1, ((None, None, None, None),))
    return _refine_step(free, frozenset({0}))


def _push_step(step: RefinementStep, v: Sequence[int]) -> NormalVector:
    source = as_matrix(step.source, v)
    target = np.zeros((step.target.tet_count, SLOTS), dtype=np.int64)
    for tet in range(step.source.tet_count):
        start = step.image_start[tet]
        if tet not in step.refined:
            target[start] = source[tet]
            continue
        block = np.zeros(4 * SLOTS, dtype=np.int64)
        for slot in range(SLOTS):
            count = int(source[tet, slot])
            if count:
                block += count * np.asarray(pattern_vector(Pattern(slot, 1)), dtype=np.int64)
        target[start:start + 4] += block.reshape(4, SLOTS)
    return tuple(int(x) for x in target.ravel())


def push_forward(m: RefinementMap, v: Sequence[int]) -> NormalVector:
    """Carry an admissible source vector through every round using the canonical patterns."""
    require_admissible(m.source, v)
    current = tuple(int(x) for x in v)
    for step in m.steps:
        current = _push_step(step, current)
    return current


@dataclass
class Pullback:
    """Result of classify_pullback.

    ``pieces[r][tet]`` counts the patterns found in refined tet ``tet`` of
    round ``r``; ``sphere_counts[k]`` is the number of link components of
    cone vertex ``k``.
    """
    source_vector: NormalVector
    sphere_counts: Tuple[int, ...]
    pieces: List[Dict[int, Dict[Pattern, int]]] = field(default_factory=list)

    @property
    def sphere_total(self) -> int:
        return sum(self.sphere_counts)

    def uses_alternate(self) -> bool:
        return any(
            p.variant == 2
            for round_pieces in self.pieces
            for found in round_pieces.values()
            for p in found
        )


def _classify_step(
    step: RefinementStep, round_index: int, v: Sequence[int]
) -> Tuple[NormalVector, Dict[int, Dict[Pattern, int]]]:
    target = as_matrix(step.target, v)
    local = local_refinement().target
    source = np.zeros((step.source.tet_count, SLOTS), dtype=np.int64)
    found: Dict[int, Dict[Pattern, int]] = {}
    for tet in range(step.source.tet_count):
        start = step.image_start[tet]
        if tet not in step.refined:
            source[tet] = target[start]
            continue
        restriction = tuple(int(x) for x in target[start:start + 4].ravel())
        problems = admissibility_problems(local, restriction)
        if problems:
            raise NotParentNormalError(round_index, tet, list(restriction), "; ".join(problems))
        counts: Dict[Pattern, int] = {}
        for piece in components(local, restriction):
            pattern = PATTERN_LOOKUP.get(piece.vector)
            if pattern is None:
                raise NotParentNormalError(
                    round_index, tet, list(piece.vector), "piece matches no refinement pattern"
                )
            counts[pattern] = counts.get(pattern, 0) + 1
            if pattern.slot != CONE_SLOT:
                source[tet, pattern.slot] += 1
        found[tet] = counts
    return tuple(int(x) for x in source.ravel()), found


def classify_pullback(m: RefinementMap, v: Sequence[int]) -> Pullback:
    """Decompose an admissible target vector into a source vector plus cone-vertex spheres.

    Rounds are undone from the finest to the coarsest. Inside each refined
    tet the restriction is split into connected pieces and every piece is
    matched against ``PATTERNS``.

    Raises:
        InadmissibleVectorError: ``v`` is not admissible on the target.
        NotParentNormalError: a piece matches no pattern, or the assembled
            source vector fails the source matching equations.
    """
    require_admissible(m.target, v)
    sphere_counts = [0] * len(m.cone_vertices)
    cone_of = {(c.round, c.tet): k for k, c in enumerate(m.cone_vertices)}
    pieces: List[Dict[int, Dict[Pattern, int]]] = [dict() for _ in m.steps]

    current = tuple(int(x) for x in v)
    for round_index in range(len(m.steps) - 1, -1, -1):
        step = m.steps[round_index]
        current, found = _classify_step(step, round_index, current)
        problems = admissibility_problems(step.source, current)
        if problems:
            raise NotParentNormalError(
                round_index, -1, list(current), "assembled source vector: " + "; ".join(problems)
            )
        for tet, counts in found.items():
            sphere_counts[cone_of[(round_index, tet)]] += counts.get(Pattern(CONE_SLOT, 0), 0)
        pieces[round_index] = found

    return Pullback(current, tuple(sphere_counts), pieces)


def realize(m: RefinementMap, pullback: Pullback) -> NormalVector:
    """Rebuild the target vector from a pullback's recorded patterns."""
    current = tuple(pullback.source_vector)
    for round_index, step in enumerate(m.steps):
        source = as_matrix(step.source, current)
        target = np.zeros((step.target.tet_count, SLOTS), dtype=np.int64)
        for tet in range(step.source.tet_count):
            start = step.image_start[tet]
            if tet not in step.refined:
                target[start] = source[tet]
                continue
            block = np.zeros(4 * SLOTS, dtype=np.int64)
            for pattern, count in pullback.pieces[round_index].get(tet, {}).items():
                block += count * np.asarray(pattern_vector(pattern), dtype=np.int64)
            target[start:start + 4] = block.reshape(4, SLOTS)
        current = tuple(int(x) for x in target.ravel())
    return current


def cone_vertex_link(m: RefinementMap, k: int) -> NormalVector:
    """Link of cone vertex ``k`` on the final target."""
    cone = m.cone_vertices[k]
    step = m.steps[cone.round]
    vector = [0] * (SLOTS * step.target.tet_count)
    for child in cone.children:
        vector[SLOTS * child + CONE_LABEL] = 1
    current = tuple(vector)
    for later in m.steps[cone.round + 1:]:
        current = _push_step(later, current)
    return current


def descendants(m: RefinementMap, tet: int) -> Tuple[Descendant, ...]:
    return m.descendants[tet]


class WeightGrowth(NamedTuple):
    slot: int
    weights: Tuple[int, ...]
    disk_counts: Tuple[int, ...]


def weight_growth(slot: int, n: int) -> WeightGrowth:
    """Weights and disk counts of one disk type pushed through ``n`` full refinements.

    Raises:
        WeightGrowthError: a step breaks d_0 = 1, w_0 >= 3, d_i >= 3 d_(i-1),
            w_i >= w_(i-1) + d_(i-1) or w_i > i.
    """
    if not 0 <= slot < SLOTS:
        raise ValueError(f"disk slot must be in 0..{SLOTS - 1}")
    if n < 0:
        raise ValueError("iteration count must be non-negative")

    t = Triangulation(1, ((None, None, None, None),))
    v = tuple(1 if k == slot else 0 for k in range(SLOTS))
    weights: List[int] = []
    disks: List[int] = []
    for i in range(n + 1):
        weights.append(weight(t, v).w1)
        disks.append(sum(v))
        if i < n:
            t, m = refine_once(t, range(t.tet_count))
            v = push_forward(m, v)

    if disks[0] != 1:
        raise WeightGrowthError(slot, 0, f"expected one disk, found {disks[0]}")
    if weights[0] < 3:
        raise WeightGrowthError(slot, 0, f"weight {weights[0]} below 3")
    for i in range(1, n + 1):
        if disks[i] < 3 * disks[i - 1]:
            raise WeightGrowthError(slot, i, f"disk count {disks[i]} < 3 * {disks[i - 1]}")
        if weights[i] < weights[i - 1] + disks[i - 1]:
            raise WeightGrowthError(
                slot, i, f"weight {weights[i]} < {weights[i - 1]} + {disks[i - 1]}"
            )
        if weights[i] <= i:
            raise WeightGrowthError(slot, i, f"weight {weights[i]} not greater than {i}")

    logger.debug("Weight growth for slot %d: %s", slot, weights)
    return WeightGrowth(slot, tuple(weights), tuple(disks))
