"""Exception hierarchy shared by all modules."""


class DnlsError(Exception):
    """Base class for library errors."""


class ConfigurationError(DnlsError, ValueError):
    """Invalid user input (degenerate lattice, inadmissible background, bad config)."""


class PoleError(DnlsError, ArithmeticError):
    """An evaluation point lies within the pole guard of a lattice point.

    Attributes
    ----------
    point : complex
        The offending argument.
    lattice_point : complex
        The nearest lattice point.
    """

    def __init__(self, message, point=None, lattice_point=None):
        super().__init__(message)
        self.point = point
        self.lattice_point = lattice_point


class SingularityError(DnlsError, ArithmeticError):
    """A dressed solution or a linear solve is singular at the requested point."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class BranchError(DnlsError, RuntimeError):
    """No consistent square-root branch could be fixed."""


class HypothesisError(DnlsError, ValueError):
    """Hypotheses of the asymptotic formulas (ordering, sign of Re beta) are violated."""

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)
