"""Exception hierarchy shared by all airyphase modules."""


class AiryPhaseError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AiryPhaseError, ValueError):
    """An argument lies outside the domain of a function."""


class InvalidStateError(AiryPhaseError, ValueError):
    """A Gaussian state violates symmetry, uncertainty or positivity."""


class InvalidParameterError(AiryPhaseError, ValueError):
    """A gate or transform parameter is out of range."""


class ConventionMismatchError(AiryPhaseError, ValueError):
    """Objects built under different hbar conventions were combined."""


class UnsupportedDegreeError(AiryPhaseError, ValueError):
    """A moment or polynomial degree exceeds what the engine supports."""


class PurityError(AiryPhaseError, ValueError):
    """An operation that needs a wavefunction received a mixed state."""


class ConvergenceError(AiryPhaseError, ArithmeticError):
    """Adaptive quadrature did not reach tolerance.

    Attributes:
        residual: the last global error estimate.
        n_panels: number of panels in use when the budget ran out.
    """

    def __init__(self, message, residual=float("nan"), n_panels=0):
        super().__init__(message)
        self.residual = residual
        self.n_panels = n_panels


class PoisonedCellError(AiryPhaseError, ArithmeticError):
    """An evaluator produced a non-finite value on a grid."""

    def __init__(self, message, q=None, p=None):
        super().__init__(message)
        self.q = q
        self.p = p


class UnboundedSupportError(AiryPhaseError, ArithmeticError):
    """Integration extent kept growing past its hard cap."""


class ConfigError(AiryPhaseError, ValueError):
    """A scene configuration failed to parse or validate."""
