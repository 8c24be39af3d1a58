"""Exception types shared across the package."""


class UnresolvedWindingError(ValueError):
    """A phase step along a loop has circle distance >= 1/2.

    The lift increment is ambiguous at this resolution; refine the graph
    level until every consecutive step along the loop is shorter than a
    half turn.
    """

    def __init__(self, edge, distance):
        self.edge = tuple(edge)
        self.distance = float(distance)
        super().__init__(
            f"unresolved winding on edge {self.edge}: circle distance "
            f"{self.distance:.6g} >= 0.5; increase the graph level"
        )


class DegreeClosureError(RuntimeError):
    """A loop lift failed to close to an integer within tolerance."""


class ConstraintViolationError(ValueError):
    """A cut-vertex pair disagrees after reduction mod 1."""


class NotAnEquilibriumError(ValueError):
    """Stability was requested for a field that is not an equilibrium."""
