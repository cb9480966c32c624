"""Exception hierarchy shared by every module."""


class GaussExError(ValueError):
    """Base class for user-facing errors."""


class DimensionMismatch(GaussExError):
    pass


class NonFiniteInput(GaussExError):
    pass


class NotSurjective(GaussExError):
    pass


class NotPSD(GaussExError):
    pass


class NotTotal(GaussExError):
    pass


class NotParallel(GaussExError):
    """Event is not a cylinder along the system's fibre."""


class UnsupportedRegion(GaussExError):
    pass


class BadPlacement(GaussExError):
    pass


class BadIndex(GaussExError):
    pass


class NotComplementary(GaussExError):
    pass


class Infeasible(GaussExError):
    """Affine constraints contradict each other."""


class BadQuery(GaussExError):
    pass


class ScopeError(GaussExError):
    pass


class InternalInconsistency(RuntimeError):
    """An invariant that should hold by construction failed numerically."""


class ModelSyntaxError(GaussExError):
    """Malformed model text; ``diagnostics`` carries the located messages."""

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)
