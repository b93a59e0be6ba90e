"""Exception types raised across the toolkit."""


class KGraphError(Exception):
    """Base class for all toolkit errors."""


class SpecFormatError(KGraphError):
    """A JSON input (graph, cocycle or family of sets) could not be parsed."""


class InvalidGraph(KGraphError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotComposable(KGraphError):
    pass


class DegreeOutOfRange(KGraphError):
    pass


class RangeMismatch(KGraphError):
    pass


class SourceMismatch(KGraphError):
    pass


class NotMember(KGraphError):
    pass


class DimensionMismatch(KGraphError):
    pass


class NotSkewSymmetric(KGraphError):
    pass


class GraphMismatch(KGraphError):
    pass


class NotPiClosed(KGraphError):
    pass


class MarginTooLarge(KGraphError):
    pass


class NotExhaustive(KGraphError):
    pass


class ContainsVertex(KGraphError):
    pass


class OutOfUniverse(KGraphError):
    """A set uses paths beyond the degree bound of a bounded computation."""


class NotHereditary(KGraphError):
    pass


class NotSaturated(KGraphError):
    pass


class UnsupportedGraphClass(KGraphError):
    pass


class VertexNotInHPer(KGraphError):
    pass


class CutoffTooSmall(KGraphError):
    pass
