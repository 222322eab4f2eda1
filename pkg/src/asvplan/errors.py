"""Exception hierarchy shared across the planner."""


class PlanningError(Exception):
    """Base class for all planner errors."""


class InputError(PlanningError):
    """Malformed user input: bad maps, bad parameters, bad config."""


class MapFormatError(InputError):
    """Map file could not be parsed.  Carries a 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DegenerateInputError(InputError):
    """Geometrically degenerate input (e.g. collinear Voronoi generators)."""


class OutOfBoundsError(InputError):
    """A queried point lies outside the map workspace."""


class PlannerFailure(PlanningError):
    """The planner could not produce a trajectory for a valid input."""


class UnreachableEndpointError(PlannerFailure):
    """Start or goal cannot be connected to the roadmap."""


class NoPathError(PlannerFailure):
    """Graph search exhausted the start's connected component.

    ``component_size`` is the number of nodes reachable from the start,
    useful for diagnosing disconnected discretizations.
    """

    def __init__(self, message: str, component_size: int):
        super().__init__(f"{message} (connected component has {component_size} nodes)")
        self.component_size = component_size


class WarmStartError(PlanningError):
    """Warm-start vector is unusable (wrong size or non-finite values)."""
