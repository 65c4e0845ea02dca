"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class FreeBiasError(Exception):
    exit_code = 1


class ParseError(FreeBiasError, ValueError):
    exit_code = 2


class SolverError(FreeBiasError, ArithmeticError):
    """A fixed-point or Newton solve did not converge.

    ``iterate`` and ``residual`` hold the last state for the worst point.
    """

    exit_code = 3

    def __init__(self, message, iterate=None, residual=None):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual


class PreconditionError(FreeBiasError, ValueError):
    exit_code = 4


class InvalidMeasure(PreconditionError):
    """Constructor arguments violate a measure invariant."""


class DomainError(PreconditionError):
    """Evaluation point outside the open upper half plane."""


class MassDeficitError(PreconditionError):
    def __init__(self, message, mass):
        super().__init__(message)
        self.mass = mass


class VerificationError(FreeBiasError):
    exit_code = 5
