"""Exception hierarchy shared by the library and the CLI."""


class IrgError(Exception):
    """Base class for every error raised by pareto_irg."""


class ParameterError(IrgError, ValueError):
    """An argument or precondition was rejected. The CLI exits with status 1."""


class QuadratureError(IrgError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class VerificationFailure(IrgError):
    """One or more verification criteria failed. The CLI exits with status 2."""
