"""Exception hierarchy shared by the solver modules."""

from __future__ import annotations


class ElectroMeniscusError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ElectroMeniscusError, ValueError):
    """An argument lies outside the domain of a formula."""


class ConfigError(ElectroMeniscusError, ValueError):
    """Material or run configuration violates its invariants."""


class StepFailure(ElectroMeniscusError):
    """The adaptive integrator could not make progress."""


class NoBracket(ElectroMeniscusError):
    """A root-finding bracket has no sign change."""


class SingularFit(ElectroMeniscusError):
    """A least-squares problem has a rank-deficient design matrix."""


class InconsistentTable(ElectroMeniscusError):
    """Tabulated data cannot be explained by a single fitted constant."""


class SingularTension(ElectroMeniscusError):
    """The local surface tension collapsed to (nearly) zero."""


class Diverged(ElectroMeniscusError):
    """A shooting trajectory escaped the admissible region.

    ``residual`` carries a signed surrogate of ``z(1)`` so that callers can
    still use the shot for bracketing.
    """

    def __init__(self, message: str, residual: float, r_escape: float):
        super().__init__(message)
        self.residual = residual
        self.r_escape = r_escape


class NoSolution(ElectroMeniscusError):
    """No equilibrium meniscus exists (the potential exceeds the limit)."""


class BadBracket(ElectroMeniscusError):
    """A potential bracket does not straddle the limit potential."""


class NoInteriorMinimum(ElectroMeniscusError):
    """The trial-shape energy has no interior minimum on the admissible range."""
