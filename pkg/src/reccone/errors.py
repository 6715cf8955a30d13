"""Exception hierarchy for the reccone package.

Every error raised by this package derives from :class:`RecconeError` so
callers can catch package failures with a single except clause.  The CLI
maps subclasses onto process exit codes.
"""


class RecconeError(Exception):
    """Base class for all reccone errors."""


class InputError(RecconeError):
    """Malformed or dimensionally inconsistent input data."""


class ParseError(InputError):
    """Instance or result text violates the JSON schema.

    Attributes
    ----------
    pointer : str
        JSON pointer ("/A/0/1" style) to the offending location.
    """

    def __init__(self, message, pointer=""):
        super().__init__(message)
        self.pointer = pointer

    def __str__(self):
        base = super().__str__()
        if self.pointer:
            return f"{base} (at {self.pointer})"
        return base


class DegenerateInput(RecconeError):
    """Geometric input is degenerate (zero normal, lower-dimensional hull, ...)."""


class EmptyPolyhedron(RecconeError):
    """An enumeration was asked for on an infeasible halfspace system."""


class UnboundedPolyhedron(RecconeError):
    """Vertex enumeration was asked for on an unbounded polyhedron."""


class InvariantViolation(RecconeError):
    """A caller-guaranteed precondition (e.g. polytope nesting) does not hold."""


class AssumptionViolation(RecconeError):
    """A problem assumption required by an algorithm fails.

    Attributes
    ----------
    condition : str
        Short name of the violated condition ("C1", "C2", "S1", ...).
    report : object or None
        The assumption report gathered up to the failure, when available.
    """

    def __init__(self, condition, message, report=None):
        super().__init__(f"{condition}: {message}")
        self.condition = condition
        self.report = report


class AlgorithmFailure(RecconeError):
    """A solver or enumeration step failed in a way the algorithm cannot repair."""


class IterationLimit(RecconeError):
    """The iteration cap was reached before certification.

    Attributes
    ----------
    partial : object or None
        Best approximation pair computed so far, when available.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SamplingExhausted(RecconeError):
    """Rejection sampling failed to produce the requested points."""


class SolverFailure(RecconeError):
    """The conic solver backend reported an unusable status."""
