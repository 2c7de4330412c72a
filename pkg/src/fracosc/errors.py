"""Exception hierarchy shared by all fracosc modules."""


class FracOscError(Exception):
    """Base class for numerical failures raised by fracosc."""


class DomainError(FracOscError, ValueError):
    """An argument lies outside the supported parameter region."""


class PoleError(DomainError):
    """Gamma function evaluated at a nonpositive integer."""


class OverflowDomainError(DomainError, OverflowError):
    """Result would overflow double precision."""


class UnsupportedParameterError(DomainError):
    """No evaluation route covers the requested (mu, nu, z)."""


class ConvergenceError(FracOscError):
    """An iterative procedure failed to reach its tolerance."""


class SeriesConvergenceError(ConvergenceError):
    pass


class AccuracyError(ConvergenceError):
    """An asymptotic expansion cannot certify the requested accuracy."""


class QuadratureError(ConvergenceError):
    pass


class InversionError(ConvergenceError):
    """Contour inversion of a Laplace image could not be certified."""


class RefinementError(ConvergenceError):
    pass


class HorizonError(FracOscError, ValueError):
    """Requested time exceeds the simulated subordinator horizon."""


class GridError(DomainError):
    """Grid too short for the requested discrete operator."""
