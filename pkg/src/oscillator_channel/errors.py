"""Exception types raised across the package."""


class OscillatorChannelError(Exception):
    """Base class for all package errors."""


class DomainError(OscillatorChannelError, ValueError):
    """An argument lies outside the domain of a formula."""


class DegenerateResonance(OscillatorChannelError, ValueError):
    """The renormalized frequencies coincide, so the rotation angle is undefined."""


class DegenerateCoupling(OscillatorChannelError, ValueError):
    """A coordinate coefficient vanishes and a decay constant would be infinite."""


class SingularForm(OscillatorChannelError, ValueError):
    """A quadratic form is not positive definite."""


class NonHermitianInput(OscillatorChannelError, ValueError):
    """A matrix expected to be Hermitian deviates by more than the allowed budget."""


class InvalidState(OscillatorChannelError, ValueError):
    """A density matrix fails the positivity or trace check."""


class ParseError(OscillatorChannelError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(OscillatorChannelError, ValueError):
    """A configuration value violates a physical or structural invariant."""
