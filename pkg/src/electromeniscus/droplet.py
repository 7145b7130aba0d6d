"""Equilibrium radius of a charged conducting spherical drop.

Everything is dimensionless. Radii are measured in units of the uncharged,
constant-tension equilibrium radius ``R_base = 2 gamma0 / c``; the pressure
function is ``LC(x) = g(x)/x + w/x**2`` with ``g`` the normalized tension and
``w`` the electric strength. Equilibrium is ``LC(x) = 1``.

The printed reference table is expressed in drop potentials ``U`` (microvolts)
through ``w = kappa * U**2 / 4``; ``kappa`` and the nucleation-radius ratio
``rho_n = R_base / R0`` are recovered from the table itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InconsistentTable, NoBracket
from .numerics import ToleranceSpec, bisect
from .tolman import TensionLaw, normalized_tension, outside_validity

# Constants recovered from the reference table (see fit_kappa / fit_rho_n).
KAPPA_TABLE = 22.481
RHO_N_TABLE = 3.0

TABLE_U = (0.0, 0.1, 0.3, 0.5, 1.0, 2.0)
TABLE_KINDS = (TensionLaw.CONSTANT, TensionLaw.EXPONENTIAL, TensionLaw.TANH_INCREASING)

_X_FLOOR = 1e-6
_ROOT_TOL = ToleranceSpec(abs_tol=1e-12, rel_tol=1e-12, max_iter=500)


@dataclass(frozen=True)
class DropletProblem:
    w: float
    kind: TensionLaw = TensionLaw.CONSTANT
    rho_n: float = RHO_N_TABLE
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", TensionLaw(self.kind))
        if self.w < 0:
            raise DomainError("electric strength must be non-negative")
        if not self.rho_n > 0:
            raise DomainError("rho_n must be positive")


@dataclass(frozen=True)
class DropletSolution:
    x: float
    w: float
    kind: TensionLaw
    outside_validity: bool = False


def lc_hat(x, w, kind=TensionLaw.CONSTANT, rho_n=RHO_N_TABLE, alpha=1.0):
    """Normalized pressure function ``g(x)/x + w/x**2``."""
    if np.any(np.asarray(x) <= 0):
        raise DomainError("radius must be positive")
    g = normalized_tension(kind, x, 1.0 / rho_n, alpha)
    return g / x + w / np.square(x)


def closed_form_radius(w: float) -> float:
    """Positive root of ``x**2 - x - w = 0`` (constant tension)."""
    if w < 0:
        raise DomainError("electric strength must be non-negative")
    return 0.5 + 0.5 * math.sqrt(1.0 + 4.0 * w)


def equilibrium_radius(w, kind=TensionLaw.CONSTANT, rho_n=RHO_N_TABLE, alpha=1.0) -> float:
    """Solve ``LC(x) = 1``; unique because ``LC`` is strictly decreasing."""
    problem = DropletProblem(w, kind, rho_n, alpha)

    def excess(x):
        return float(lc_hat(x, problem.w, problem.kind, problem.rho_n, problem.alpha)) - 1.0

    hi = 2.0 * closed_form_radius(problem.w) + 1.0
    if excess(_X_FLOOR) < 0:
        raise NoBracket("pressure function below unity at the smallest radius")
    return bisect(excess, _X_FLOOR, hi, _ROOT_TOL)


def solve(problem: DropletProblem) -> DropletSolution:
    x = equilibrium_radius(problem.w, problem.kind, problem.rho_n, problem.alpha)
    flag = problem.kind is not TensionLaw.CONSTANT and outside_validity(x, 1.0 / problem.rho_n)
    return DropletSolution(x=x, w=problem.w, kind=problem.kind, outside_validity=flag)


def strength(U: float, kappa: float = KAPPA_TABLE) -> float:
    """Electric strength ``w`` for a drop potential ``U`` in microvolts."""
    return kappa * U * U / 4.0


@dataclass(frozen=True)
class KappaFit:
    kappa: float
    spread: float  # (max - min) / mean over rows
    per_row: tuple[float, ...]


def fit_kappa(column: Iterable[tuple[float, float]], max_spread: float = 0.01) -> KappaFit:
    """Recover ``kappa`` from constant-tension rows ``(U, x)``.

    Each row with ``U > 0`` is inverted in closed form,
    ``kappa = ((2x - 1)**2 - 1) / U**2``, and the values are averaged.
    """
    values = []
    for U, x in column:
        if U > 0:
            values.append(((2.0 * x - 1.0) ** 2 - 1.0) / (U * U))
    if not values:
        raise InconsistentTable("no rows with positive potential")
    arr = np.asarray(values)
    mean = float(arr.mean())
    spread = float(np.ptp(arr) / abs(mean))
    if spread > max_spread:
        raise InconsistentTable(f"per-row kappa spread {spread:.3%} exceeds {max_spread:.1%}")
    return KappaFit(kappa=mean, spread=spread, per_row=tuple(values))


def fit_rho_n(x0: float) -> float:
    """Invert the uncharged exponential-law equilibrium ``x = 1 - exp(-rho_n x)``."""
    if not 0 < x0 < 1:
        raise DomainError("uncharged exponential-law radius must lie in (0, 1)")
    return -math.log1p(-x0) / x0


def rmin_table(U_list: Sequence[float], kappa: float = KAPPA_TABLE, rho_n: float = RHO_N_TABLE,
               alpha: float = 1.0, kinds: Sequence[TensionLaw] = TABLE_KINDS):
    """Equilibrium radii for each potential and law.

    Returns a list of ``(U, {kind: x})`` rows in input order.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    rows = []
    for U in U_list:
        w = strength(U, kappa)
        rows.append((U, {TensionLaw(k): equilibrium_radius(w, k, rho_n, alpha) for k in kinds}))
    return rows
