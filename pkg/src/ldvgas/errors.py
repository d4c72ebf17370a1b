"""Failure modes the solver can hit at runtime."""


class SolverError(Exception):
    """Base class for solver failures."""


class NegativeTemperatureError(SolverError):
    """A moment update produced a non-realizable state (rho <= 0 or T <= 0)."""

    def __init__(self, message: str, cell: int | None = None):
        super().__init__(message)
        self.cell = cell


class DegenerateGridError(SolverError):
    """A velocity grid cannot be built (zero span, all-zero temperatures, ...)."""


class MaxwellianConvergenceError(SolverError):
    """The moment-matching Newton iteration did not converge."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class EnlargementOverflowError(SolverError):
    """Grid enlargement ran past the hard cap on node count."""


class DegenerateWallError(SolverError):
    """A diffuse wall saw a zero incoming-Maxwellian half flux."""
