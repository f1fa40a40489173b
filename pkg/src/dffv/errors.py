"""Exception types shared across the solver."""


class DffvError(Exception):
    """Base class for all solver errors."""


class NonAdmissible(DffvError):
    """State left the admissible set (rho or p at/below the vacuum floor).

    Raised instead of clipping: a positivity failure signals a scheme or
    setup bug and must not be masked.
    """

    def __init__(self, message, where=None, time=None):
        detail = message
        if where is not None:
            detail += f" at cell {where}"
        if time is not None:
            detail += f" at t={time:.6g}"
        super().__init__(detail)
        self.where = where
        self.time = time


class DegenerateEigenbasis(DffvError):
    """Eigenvector matrix numerically singular (condition number > 1e12)."""


class VacuumFormation(DffvError):
    """Riemann data violates the pressure positivity condition."""


class BadResolution(DffvError):
    """Mesh resolution below the supported minimum or bounds unordered."""


class IncompatibleGrids(DffvError):
    """Fields live on grids that cannot be compared or restricted."""


class NonSquareGrid(DffvError):
    """Operation requires nx == ny and a square domain."""


class ConfigError(DffvError):
    """Invalid or unknown run-configuration key."""
