"""Exception hierarchy shared across the package."""


class AstschedError(Exception):
    """Base class for all domain errors raised by this package."""


# --- TLE / propagation ------------------------------------------------------

class FormatError(AstschedError):
    """A TLE line violates the fixed-column layout."""


class ChecksumError(FormatError):
    """A TLE line fails its modulo-10 checksum."""


class DecayError(AstschedError):
    """Propagation produced a sub-surface position (decayed or bad elements)."""


# --- geometry ---------------------------------------------------------------

class DegenerateError(AstschedError):
    """Polygon ring is degenerate (collinear or repeated vertices)."""


class GeometryError(AstschedError):
    """Strip or footprint geometry is invalid."""


class NoCoverageError(AstschedError):
    """An observation window sweeps no ground along the strip axis."""


class EmptyTargetsError(AstschedError):
    """Area recall requested against an empty target set."""


# --- scenario / session -----------------------------------------------------

class ParseError(AstschedError):
    """Scenario document could not be parsed."""


class SchemaError(AstschedError):
    """Scenario document violates the schema or an inventory invariant."""


class UnknownEntityError(AstschedError):
    """An action references an id absent from the inventory."""


class UnknownActionError(AstschedError):
    """No staged action carries the given id."""


class UnknownPolygonError(AstschedError):
    """Strip registration names a polygon target that does not exist."""


class UnknownRequestError(AstschedError):
    """Allocation references a request id absent from the scenario."""


class SessionCommittedError(AstschedError):
    """Mutation attempted on a committed (read-only) session."""


class ValidationError(AstschedError):
    """Commit refused; carries the full validation report."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"plan invalid: {len(report.errors())} error finding(s)")


class OrderingError(AstschedError):
    """Maneuver check called with actions out of time order."""


# --- persistence ------------------------------------------------------------

class LockHeldError(AstschedError):
    """Another process holds the session write lock."""


class CorruptStateError(AstschedError):
    """Session-state file is truncated or otherwise unreadable."""


# --- networking / evaluation ------------------------------------------------

class UnknownNodeError(AstschedError):
    """Routing query names a node absent from the contact graph."""


# --- generation -------------------------------------------------------------

class InsufficientCatalogError(AstschedError):
    """TLE catalog cannot supply the requested archetype subsample."""


class EmptyBandError(AstschedError):
    """No cities fall inside the constellation's accessible latitude band."""
