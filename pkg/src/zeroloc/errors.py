"""Exception hierarchy shared by all modules."""


class ZerolocError(Exception):
    """Base class for every error raised by this package."""


class InputError(ZerolocError, ValueError):
    """Invalid construction parameters or malformed input."""


class ZeroLeadingCoefficient(InputError):
    pass


class NonpositiveFactor(InputError):
    pass


class DegenerateConstantPair(InputError):
    pass


class SchemaError(InputError):
    pass


class BadOrder(InputError):
    pass


class NonPrimitiveMu(InputError):
    pass


class NumericalError(ZerolocError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy answer."""


class EvaluationOverflow(NumericalError):
    pass


class SingularInput(NumericalError):
    pass


class PoleAtInput(SingularInput):
    pass


class OriginInput(SingularInput):
    pass


class SingularRadius(SingularInput):
    pass


class DegenerateMonotonicity(NumericalError):
    pass


class UnresolvedJump(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, worst_residual=None):
        super().__init__(message)
        self.worst_residual = worst_residual


class NewtonDiverged(NumericalError):
    pass


class TrustRadiusExceeded(NumericalError):
    pass


class ZeroSum(NumericalError):
    pass


class AmbiguousCase(NumericalError):
    pass


class EmptyZeroList(ZerolocError, ValueError):
    pass


class PropertyViolation(ZerolocError):
    """A checked mathematical property failed; ``report`` holds the evidence."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ChainViolation(PropertyViolation):
    pass
