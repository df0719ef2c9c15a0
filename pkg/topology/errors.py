"""Exception hierarchy for the topology core."""

from typing import Any, List, Optional


class TopologyError(Exception):
    """Base class for every error raised by the topology core."""


class TriangulationFormatError(TopologyError):
    """A triangulation file could not be parsed."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class InvalidTriangulationError(TopologyError):
    """A gluing table violates the triangulation invariants."""

    def __init__(self, issues: List[Any]):
        self.issues = list(issues)
        summary = "; ".join(str(issue) for issue in self.issues[:3])
        if len(self.issues) > 3:
            summary += f"; ... ({len(self.issues)} issues)"
        super().__init__(summary)


class BoundaryComponentError(TopologyError):
    """A boundary component id is invalid or the component is not closed."""


class NormalCoordinateError(TopologyError):
    """A normal vector has the wrong length or a malformed file entry."""


class InadmissibleVectorError(TopologyError):
    """An operation that needs an admissible vector was given something else."""


class DisconnectedSurfaceError(TopologyError):
    """An operation that needs a connected surface was given several components."""


class NotParentNormalError(TopologyError):
    """A piece of a refined surface matches none of the known local patterns.

    Never raised for admissible input.
    """

    def __init__(self, round_index: int, tet: int, piece: Optional[List[int]], message: str):
        self.round_index = round_index
        self.tet = tet
        self.piece = piece
        super().__init__(f"round {round_index}, tet {tet}: {message}")


class SurfaceFormatError(TopologyError):
    """A surface triangulation file could not be parsed or is not valid."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line else message)


class CyclicTriangleError(TopologyError):
    """The prism construction was asked to use a cyclically oriented triangle."""


class InconsistentOrientationError(TopologyError):
    """Two glued edge slots disagree on the direction of their edge."""


class NonSphereBoundaryError(TopologyError):
    """A boundary component that must be closed off by coning is not a sphere."""


class EnumerationLimitError(TopologyError):
    """Enumeration produced more vectors than the configured budget allows."""

    def __init__(self, partial_count: int, limit: int):
        self.partial_count = partial_count
        self.limit = limit
        super().__init__(
            f"enumeration exceeded the budget of {limit} vectors "
            f"({partial_count} found before stopping)"
        )


class WeightGrowthError(TopologyError):
    """A weight-growth sequence broke one of its recurrences."""

    def __init__(self, disk: int, index: int, message: str):
        self.disk = disk
        self.index = index
        super().__init__(f"disk slot {disk}, step {index}: {message}")


class ScalingFunctionError(TopologyError):
    """A scaling function or tet selection does not fit the triangulation."""
