"""Exception types raised across lemlab."""


class DomainError(ValueError):
    """A parameter or point lies outside the domain an operation accepts."""


class DimensionMismatch(ValueError):
    pass


class MixedMetricError(ValueError):
    pass


class QuadratureDegeneracy(RuntimeError):
    """Too many quadrature nodes landed on a pole of the integrand."""


class NotLelongClass(ValueError):
    """Sphere means grow faster than log R plus a constant."""


class NormalizationError(ValueError):
    pass
