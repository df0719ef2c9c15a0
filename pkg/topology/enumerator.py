"""Bounded exhaustive enumeration of admissible normal vectors."""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .errors import EnumerationLimitError
from .normal_coords import (
    SLOTS,
    NormalVector,
    components,
    is_admissible,
    pl_area,
)
from .tri_core import EDGES, Triangulation, compute_skeleton, face_vertices, quad_pairing

logger = logging.getLogger(__name__)

DEFAULT_MAX_RESULTS = 500_000

# Quads crossing each tet-edge, and the edges at each corner.
_QUADS_ON_EDGE: Tuple[FrozenSet[int], ...] = tuple(
    frozenset(q for q in range(3) if q != quad_pairing(a, b)) for a, b in EDGES
)
_EDGES_AT: Tuple[Tuple[int, ...], ...] = tuple(
    tuple(k for k, pair in enumerate(EDGES) if v in pair) for v in range(4)
)


@dataclass(frozen=True)
class EnumerationQuery:
    triangulation: Triangulation
    max_w1: int
    support: Optional[FrozenSet[int]] = None
    closed_only: bool = False

    def __post_init__(self):
        if self.max_w1 < 1:
            raise ValueError(f"max_w1 must be at least 1, got {self.max_w1}")
        if self.support is not None:
            bad = sorted(t for t in self.support if not 0 <= t < self.triangulation.tet_count)
            if bad:
                raise ValueError(f"support tets out of range: {bad}")

    def allows(self, tet: int) -> bool:
        return self.support is None or tet in self.support


def _crossings(vector: Sequence[int]) -> List[int]:
    quads = vector[4:]
    return [
        vector[a] + vector[b] + sum(quads[q] for q in _QUADS_ON_EDGE[k])
        for k, (a, b) in enumerate(EDGES)
    ]


def _arc(vector: Sequence[int], face: int, corner: int) -> int:
    return vector[corner] + vector[4 + quad_pairing(face, corner)]


class _Search:
    """Depth-first search over tets in index order with edge-class weight bookkeeping."""

    def __init__(self, query: EnumerationQuery, max_results: int):
        self.query = query
        self.max_results = max_results
        t = query.triangulation
        skeleton = compute_skeleton(t)
        self.edge_class = skeleton.edge_of
        self.class_crossing = [-1] * len(skeleton.edge_classes)
        self.fixed_by = [-1] * len(skeleton.edge_classes)
        self.bound = 0
        self.vectors: List[Optional[Tuple[int, ...]]] = [None] * t.tet_count
        self.nodes = 0

    def _constraints(self, tet: int) -> Tuple[Dict[int, Dict[int, int]], List[int]]:
        t = self.query.triangulation
        known: Dict[int, Dict[int, int]] = {}
        self_glued = []
        for face in range(4):
            glue = t.gluings[tet][face]
            if glue is None:
                if self.query.closed_only:
                    known[face] = {c: 0 for c in face_vertices(face)}
            elif glue.tet < tet:
                other = self.vectors[glue.tet]
                target_face = glue.perm[face]
                known[face] = {
                    c: _arc(other, target_face, glue.perm[c]) for c in face_vertices(face)
                }
            elif glue.tet == tet:
                self_glued.append(face)
        return known, self_glued

    def options(self, tet: int) -> Iterator[Tuple[int, ...]]:
        """Local 7-vectors for ``tet`` consistent with every earlier tet."""
        known, self_glued = self._constraints(tet)
        residual = self.query.max_w1 - self.bound
        classes = self.edge_class[tet]
        fixed = [self.class_crossing[cls] for cls in classes]
        edge_limit = [x if x >= 0 else residual for x in fixed]

        zero_only = not self.query.allows(tet)
        if zero_only:
            quad_choices = [(None, 0)]
        else:
            quad_choices = [(None, 0)] + [
                (q, n)
                for q in range(3)
                for n in range(1, min(edge_limit[k] for k in range(6) if q in _QUADS_ON_EDGE[k]) + 1)
            ]

        for q, n in quad_choices:
            ranges = []
            feasible = True
            for c in range(4):
                values = {
                    arcs[c] - (n if q is not None and quad_pairing(face, c) == q else 0)
                    for face, arcs in known.items()
                    if c in arcs
                }
                if len(values) > 1 or any(x < 0 for x in values):
                    feasible = False
                    break
                # tets outside the support stay empty, whatever earlier tets force
                if zero_only and any(values):
                    feasible = False
                    break
                if values:
                    ranges.append((values.pop(),))
                elif zero_only:
                    ranges.append((0,))
                else:
                    ranges.append(range(min(edge_limit[k] for k in _EDGES_AT[c]) + 1))
            if not feasible:
                continue

            quads = [0, 0, 0]
            if q is not None:
                quads[q] = n
            for tris in itertools.product(*ranges):
                vector = tuple(tris) + tuple(quads)
                self.nodes += 1
                if self._fits(vector, classes, fixed, residual) and all(
                    self._self_matches(vector, tet, face) for face in self_glued
                ):
                    yield vector

    def _fits(self, vector, classes, fixed, residual) -> bool:
        crossings = _crossings(vector)
        fresh: Dict[int, int] = {}
        for k, value in enumerate(crossings):
            if fixed[k] >= 0:
                if value != fixed[k]:
                    return False
                continue
            seen = fresh.setdefault(classes[k], value)
            if seen != value:
                return False
        return sum(fresh.values()) <= residual

    def _self_matches(self, vector, tet: int, face: int) -> bool:
        glue = self.query.triangulation.gluings[tet][face]
        target_face = glue.perm[face]
        return all(
            _arc(vector, face, c) == _arc(vector, target_face, glue.perm[c])
            for c in face_vertices(face)
        )

    def _place(self, tet: int, vector: Tuple[int, ...]) -> None:
        self.vectors[tet] = vector
        for k, value in enumerate(_crossings(vector)):
            cls = self.edge_class[tet][k]
            if self.class_crossing[cls] < 0:
                self.class_crossing[cls] = value
                self.fixed_by[cls] = tet
                self.bound += value

    def _unplace(self, tet: int) -> None:
        for cls in self.edge_class[tet]:
            if self.fixed_by[cls] == tet:
                self.bound -= self.class_crossing[cls]
                self.class_crossing[cls] = -1
                self.fixed_by[cls] = -1
        self.vectors[tet] = None

    def run(self, first: Optional[Sequence[Tuple[int, ...]]] = None) -> List[NormalVector]:
        count = self.query.triangulation.tet_count
        if count == 0:
            return []
        results: List[NormalVector] = []
        stack: List[Iterator[Tuple[int, ...]]] = [iter(first) if first is not None else self.options(0)]
        while stack:
            tet = len(stack) - 1
            if self.vectors[tet] is not None:
                self._unplace(tet)
            option = next(stack[-1], None)
            if option is None:
                stack.pop()
                continue
            self._place(tet, option)
            if tet < count - 1:
                stack.append(self.options(tet + 1))
                continue
            flat = tuple(x for vector in self.vectors for x in vector)
            if any(flat):
                results.append(flat)
                if len(results) > self.max_results:
                    raise EnumerationLimitError(len(results), self.max_results)
        return results


def _search_subtree(args: Tuple[EnumerationQuery, List[Tuple[int, ...]], int]) -> List[NormalVector]:
    query, first, max_results = args
    return _Search(query, max_results).run(first)


def enumerate_admissible(
    q: EnumerationQuery,
    max_results: int = DEFAULT_MAX_RESULTS,
    workers: int = 1,
) -> List[NormalVector]:
    """Every nonzero admissible vector with w1 <= q.max_w1, sorted lexicographically.

    With ``workers`` > 1 the options of tet 0 are dealt round-robin to a
    process pool; the merged output is identical to the sequential one.

    Raises:
        EnumerationLimitError: more than ``max_results`` vectors were found.
    """
    if workers > 1 and q.triangulation.tet_count > 0:
        roots = list(_Search(q, max_results).options(0))
        chunks = [roots[k::workers] for k in range(workers)]
        results: List[NormalVector] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_search_subtree, [(q, chunk, max_results) for chunk in chunks if chunk]):
                results.extend(part)
                if len(results) > max_results:
                    raise EnumerationLimitError(len(results), max_results)
    else:
        search = _Search(q, max_results)
        results = search.run()
        logger.debug("Search visited %d candidate tet vectors", search.nodes)

    results.sort()
    logger.info(
        "Enumerated %d admissible vectors on %d tets (max_w1=%d, closed_only=%s)",
        len(results), q.triangulation.tet_count, q.max_w1, q.closed_only,
    )
    return results


def enumerate_connected(
    q: EnumerationQuery,
    max_results: int = DEFAULT_MAX_RESULTS,
    workers: int = 1,
) -> List[Tuple[NormalVector, int]]:
    """Connected vectors of ``enumerate_admissible`` with their Euler characteristics."""
    connected = []
    for vector in enumerate_admissible(q, max_results, workers):
        parts = components(q.triangulation, vector)
        if len(parts) == 1:
            connected.append((vector, parts[0].euler_characteristic))
    return connected


def local_vectors(bound: int) -> List[Tuple[int, ...]]:
    """All per-tet 7-vectors with at most one quad type and coordinate sum <= bound."""
    vectors = []
    for tris in itertools.product(range(bound + 1), repeat=4):
        spare = bound - sum(tris)
        if spare < 0:
            continue
        vectors.append(tris + (0, 0, 0))
        for q in range(3):
            for n in range(1, spare + 1):
                quads = [0, 0, 0]
                quads[q] = n
                vectors.append(tris + tuple(quads))
    return vectors


def default_tet_sum_bound(q: EnumerationQuery) -> int:
    """Largest possible disk count in one tet for vectors within the cap."""
    skeleton = compute_skeleton(q.triangulation)
    if all(len(set(row)) == 6 for row in skeleton.edge_of):
        return q.max_w1 // 3
    return 2 * q.max_w1


def enumerate_naive(
    q: EnumerationQuery,
    tet_sum_bound: Optional[int] = None,
    max_results: int = DEFAULT_MAX_RESULTS,
) -> List[NormalVector]:
    """Brute-force filter over the full box; the reference for ``enumerate_admissible``."""
    t = q.triangulation
    bound = default_tet_sum_bound(q) if tet_sum_bound is None else tet_sum_bound
    local = local_vectors(bound)
    zero = (0,) * SLOTS
    per_tet = [local if q.allows(tet) else [zero] for tet in range(t.tet_count)]
    boundary = t.boundary_faces()

    results: List[NormalVector] = []
    for choice in itertools.product(*per_tet):
        flat = tuple(x for vector in choice for x in vector)
        if not any(flat) or not is_admissible(t, flat):
            continue
        if q.closed_only and any(
            _arc(choice[tet], face, c) for tet, face in boundary for c in face_vertices(face)
        ):
            continue
        if pl_area(t, flat).w1 > q.max_w1:
            continue
        results.append(flat)
        if len(results) > max_results:
            raise EnumerationLimitError(len(results), max_results)
    results.sort()
    return results


def boundary_arcs(t: Triangulation, v: Sequence[int]) -> int:
    """Total arcs on boundary faces; zero for vectors admitted by closed_only queries."""
    total = 0
    for tet, face in t.boundary_faces():
        vector = v[SLOTS * tet:SLOTS * (tet + 1)]
        total += sum(_arc(vector, face, c) for c in face_vertices(face))
    return total
