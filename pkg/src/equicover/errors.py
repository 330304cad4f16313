class EquicoverError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMassError(EquicoverError, ValueError):
    pass


class PreconditionError(EquicoverError, ValueError):
    pass


class QuantileUnreachable(EquicoverError, ValueError):
    pass


class SolverError(EquicoverError, RuntimeError):
    """A numerical search ran out of budget.

    ``residual`` holds the best residual reached, ``diagnostics`` whatever the
    solver found worth reporting (residual curves, brackets tried).
    """

    def __init__(self, message, residual=float("nan"), diagnostics=None):
        super().__init__(message)
        self.residual = residual
        self.diagnostics = diagnostics or {}


class CenterpointError(SolverError):
    pass


class VerificationError(EquicoverError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
