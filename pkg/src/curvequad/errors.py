"""Exception types shared across the package."""


class CurveQuadError(Exception):
    """Base class for all package errors."""


class ZeroPolynomial(CurveQuadError):
    pass


class DimensionMismatch(CurveQuadError):
    pass


class DomainError(CurveQuadError):
    pass


class PoleInSupport(CurveQuadError):
    pass


class IntegrationFailure(CurveQuadError):
    pass


class InsufficientDegree(CurveQuadError):
    pass


class DegenerateMeasure(CurveQuadError):
    """The moment sequence is rank deficient at ``depth``.

    The measure is then supported on at most ``depth`` points.
    """

    def __init__(self, depth, message=None):
        self.depth = int(depth)
        super().__init__(message or f"measure is degenerate at depth {depth}")


class NotPolynomialParametrization(CurveQuadError):
    pass


class HypothesisViolated(CurveQuadError):
    pass


class NumericalStall(CurveQuadError):
    pass


class InfeasibleStart(CurveQuadError):
    pass


class Nonconvergence(CurveQuadError):
    pass


class MassCorrectionNegative(CurveQuadError):
    pass


class RankDeficientFit(CurveQuadError):
    pass
