"""Energy minimization over parabolic trial menisci.

The trial meniscus is ``z = z_m (1 - r^2)``, attached at the pipet edge.
Energies are in units of ``pi * gamma0 * R^2`` and depend on the problem only
through ``(k1, k2, k3, d_hat)``:

* surface   ``e_gamma = ((1 + 4 z_m^2)^{3/2} - 1) / (6 z_m^2)``
* gravity   ``e_g = -k1 (k2 z_m / 2 + z_m^2 / 6)``
* electric  ``e_e = -k3 * Q``, with ``Q = 2 z_m reff^2 / ln(1 + 4 z_m (d_hat - z_m))``

The electric term enters with a negative sign: at fixed potential the
generator does work ``Q U0``, so the relevant potential is ``-Q U0 / 2``.
``reff`` (an effective radius in units of ``R``) corrects the
infinite-conductor capacitance for the finite pipet and plate; it is
calibrated against the shooting solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NoInteriorMinimum
from .meniscus import MaterialPreset, MeniscusProblem, derive_problem
from .numerics import ToleranceSpec, fit_scalar, minimize_scalar

ZM_MIN = 1e-6
ZM_MAX = 1.0
REFF_RANGE = (0.1, 0.9)

_SCAN = np.concatenate([np.geomspace(ZM_MIN, 0.01, 9), np.linspace(0.02, ZM_MAX, 50)])
_MIN_TOL = ToleranceSpec(abs_tol=1e-10, rel_tol=1e-10, max_iter=500)


@dataclass(frozen=True)
class ParabolicTrial:
    z_m: float

    def __post_init__(self):
        if not 0 < self.z_m <= ZM_MAX:
            raise DomainError("trial tip height must lie in (0, 1]")

    @property
    def h(self) -> float:
        return focus_offset(self.z_m)

    @property
    def zeta0_sq(self) -> float:
        """Parabolic coordinate of the trial surface, ``2 (z_m + h) = 1 / (2 z_m)``."""
        return 2.0 * (self.z_m + self.h)


@dataclass(frozen=True)
class EnergyBreakdown:
    e_g: float
    e_gamma: float
    e_e: float

    @property
    def total(self) -> float:
        return self.e_g + self.e_gamma + self.e_e


@dataclass(frozen=True)
class CalibrationResult:
    reff_hat: float
    rms_error: float
    degenerate: bool = False
    curve: tuple = ()  # (U, z_var, z_shoot) rows


def focus_offset(z_m: float) -> float:
    """Shift ``h`` that makes the trial parabola a coordinate curve about the focus."""
    if not z_m > 0:
        raise DomainError("tip height must be positive")
    return 0.25 / z_m - z_m


def surface_energy(z_m: float) -> float:
    """Area of the trial cap divided by the pipet cross-section."""
    if z_m < 1e-8:
        return 1.0
    s = 4.0 * z_m * z_m
    return math.expm1(1.5 * math.log1p(s)) / (6.0 * z_m * z_m)


def gravity_energy(z_m: float, k1: float, k2: float) -> float:
    if z_m < 0:
        raise DomainError("tip height must be non-negative")
    return -k1 * (0.5 * k2 * z_m + z_m * z_m / 6.0)


def _log_gap(z_m: float, d_hat: float) -> float:
    if not 0 < z_m < d_hat:
        raise DomainError("need 0 < z_m < d_hat")
    # log1p keeps the plate-capacitor limit accurate for tiny z_m
    return math.log1p(4.0 * z_m * (d_hat - z_m))


def total_charge(z_m: float, d_hat: float, reff_hat: float) -> float:
    """Charge on the trial surface in units of ``2 pi eps U0 R``."""
    return 2.0 * z_m * reff_hat * reff_hat / _log_gap(z_m, d_hat)


def electric_energy(z_m: float, k3: float, d_hat: float, reff_hat: float) -> float:
    if k3 == 0:
        _log_gap(z_m, d_hat)
        return 0.0
    return -k3 * total_charge(z_m, d_hat, reff_hat)


def energy(z_m: float, problem: MeniscusProblem, reff_hat: float) -> EnergyBreakdown:
    return EnergyBreakdown(
        e_g=gravity_energy(z_m, problem.k1, problem.k2),
        e_gamma=surface_energy(z_m),
        e_e=electric_energy(z_m, problem.k3, problem.d_hat, reff_hat),
    )


def minimize_energy(problem: MeniscusProblem, reff_hat: float,
                    tol: ToleranceSpec | None = None) -> float:
    """Tip height of the lowest-lying local energy minimum on ``(1e-6, 1]``.

    A coarse scan locates the first local minimum from the left (the branch
    continuing from ``U = 0``), which is then refined by Brent's method.

    Raises
    ------
    NoInteriorMinimum
        When the energy still decreases at ``z_m = 1``: no equilibrium below
        the limit height.
    """
    if not 0 < reff_hat < 1:
        raise DomainError("reff_hat must lie in (0, 1)")

    def total(z):
        return energy(z, problem, reff_hat).total

    values = np.array([total(z) for z in _SCAN])
    n = len(_SCAN)
    for i in range(n):
        left = values[i - 1] if i > 0 else math.inf
        right = values[i + 1] if i < n - 1 else math.inf
        if values[i] <= left and values[i] <= right:
            break
    if i == n - 1:
        raise NoInteriorMinimum("energy decreases up to the limit height")
    lo = _SCAN[max(i - 1, 0)]
    hi = _SCAN[min(i + 1, n - 1)]
    return minimize_scalar(total, lo, hi, tol or _MIN_TOL)


def variational_curve(preset: MaterialPreset, U_list: Sequence[float], reff_hat: float) -> list:
    """``z_m`` per potential; ``None`` above the variational limit potential."""
    out = []
    for U in U_list:
        try:
            out.append(minimize_energy(derive_problem(preset, U), reff_hat))
        except NoInteriorMinimum:
            out.append(None)
    return out


def calibrate_reff(shooting_curve: Sequence[tuple[float, float]], preset: MaterialPreset,
                   tol: ToleranceSpec | None = None) -> CalibrationResult:
    """Least-squares ``reff`` matching variational to shooting tip heights.

    A point above the variational limit potential is scored at the limit
    height, which keeps the objective continuous in ``reff``.
    """
    curve = [(float(U), float(z)) for U, z in shooting_curve]
    if not curve:
        raise DomainError("empty shooting curve")
    U_list = [U for U, _ in curve]
    target = [z for _, z in curve]

    def model(reff):
        return [ZM_MAX if z is None else z for z in variational_curve(preset, U_list, reff)]

    fit = fit_scalar(model, target, *REFF_RANGE, tol or ToleranceSpec(1e-6, 1e-6))
    z_var = model(fit.theta)
    rows = tuple((U, zv, zs) for U, zv, zs in zip(U_list, z_var, target))
    return CalibrationResult(reff_hat=fit.theta, rms_error=math.sqrt(fit.sse / len(curve)),
                             degenerate=fit.degenerate, curve=rows)
