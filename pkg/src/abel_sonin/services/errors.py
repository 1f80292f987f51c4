class AbelSoninError(Exception):
    """Base class for every error raised by abel_sonin."""

    kind = "error"


class PreconditionError(AbelSoninError, ValueError):
    """An argument or configuration value is outside its valid range."""

    kind = "precondition"

    def __init__(self, message, field=None, valid_range=None):
        super().__init__(message)
        self.field = field
        self.valid_range = valid_range


class DomainError(PreconditionError):
    kind = "domain"


class NumericalError(AbelSoninError, ArithmeticError):
    kind = "numerical"


class EvaluationError(NumericalError):
    """An integrand produced a non-finite value at a quadrature node."""

    kind = "evaluation"

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class QuadratureError(NumericalError):
    kind = "quadrature"


class SoninConditionError(NumericalError):
    kind = "sonin"

    def __init__(self, message, max_residual):
        super().__init__(message)
        self.max_residual = max_residual
