"""Exception hierarchy shared by all modules."""


class HierarchyLabError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(HierarchyLabError, ValueError):
    """Operands disagree on the number of variables (or a dimension is invalid)."""


class IncompleteSequenceError(HierarchyLabError, KeyError):
    """A moment sequence lacks an index that an operation needs."""

    def __str__(self):
        return Exception.__str__(self)


class DegenerateConstraintError(HierarchyLabError, ValueError):
    """A constraint polynomial is zero, so its degree bound is undefined."""


class OrderTooSmallError(HierarchyLabError, ValueError):
    """The relaxation order cannot accommodate the objective or a constraint."""


class InvalidDecompositionError(HierarchyLabError, ValueError):
    """A weighted-square decomposition has a negative weight or a bad shape."""


class UnsupportedError(HierarchyLabError, ValueError):
    """The request is outside what the operation handles (degree, constraint count)."""


class ParseError(HierarchyLabError, ValueError):
    """Malformed polynomial text or problem/certificate document."""


class MissingDualBlockError(HierarchyLabError, KeyError):
    """A solve result carries no dual block for the requested constraint."""

    def __str__(self):
        return Exception.__str__(self)


class SolverFailureError(HierarchyLabError, RuntimeError):
    """A relaxation solve ended without an optimal status."""

    def __init__(self, message, order=None, status=None):
        super().__init__(message)
        self.order = order
        self.status = status
