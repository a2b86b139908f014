"""Exception hierarchy shared across the package."""


class OugapError(Exception):
    """Base class for all package errors."""


class InvalidOrderError(OugapError, ValueError):
    pass


class DomainError(OugapError, ValueError):
    """A point, diameter or domain description lies outside the admissible set."""


class ContractViolation(OugapError, ValueError):
    """An input does not satisfy a documented precondition."""


class NumericalError(OugapError, ArithmeticError):
    """Base for failures of the numerics themselves (CLI exit code 3)."""


class AccuracyError(NumericalError):
    pass


class SpectralExtractionError(NumericalError):
    pass


class DegenerateSpectrumError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ResolutionError(NumericalError):
    pass


class LemmaViolation(NumericalError):
    """A structural property that theory guarantees failed numerically."""


class PositivityError(LemmaViolation):
    pass


class ExperimentSetupError(OugapError, ValueError):
    pass
