"""Free-boundary solver for a charged pendant meniscus.

The profile ``z(r)`` (tip at ``r = 0``, contact with the pipet at ``r = 1``,
``z`` pointing toward the grounded plate) satisfies the normal balance

    k1 (k2 + z) + g(r) * kappa_tot + (k3 / 2) E(r, z)^2 = 0

where ``kappa_tot`` is the (signed) sum of principal curvatures, ``g`` the
normalized surface tension and ``E`` the normalized surface field of
:func:`electromeniscus.efield.surface_field`. Solved for ``z''`` this is an
ODE integrated outward from the axis; the unknown tip height is fixed by
shooting on ``z(1) = 0``. The field depends on the tip height itself, which is
slaved to the shooting parameter so one scalar root enforces both conditions.

Curvature-dependent tension enters through a frozen coefficient: the tension
is tabulated on the parabola of the current tip height and the profile is
re-solved until the tip height is stationary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .efield import gap_constant, surface_field
from .errors import (
    BadBracket,
    ConfigError,
    Diverged,
    DomainError,
    NoBracket,
    NoSolution,
    SingularTension,
)
from .numerics import ToleranceSpec, Trajectory, bisect, fit_quadratic, integrate_ivp
from .tolman import TensionLaw, normalized_tension

EPSILON_0 = 8.854e-12  # F/m, vapour taken as vacuum
G_ACCEL = 9.81  # m/s^2

R_EPS = 1e-3  # axis regularization radius
Z_ESCAPE = 2.0
SLOPE_ESCAPE = 1e3
RESIDUAL_TOL = 1e-4
ZM_LO, ZM_HI = 1e-6, 1.2
N_PROFILE = 201
MIN_TENSION = 1e-6

SOLVE_TOL = ToleranceSpec(abs_tol=1e-12, rel_tol=1e-10)
SCAN_TOL = ToleranceSpec(abs_tol=1e-9, rel_tol=1e-7)
_ROOT_TOL = ToleranceSpec(abs_tol=1e-11, rel_tol=1e-11, max_iter=200)
_REVERSE_TOL = ToleranceSpec(abs_tol=1e-10, rel_tol=1e-10, max_iter=200)

GammaFn = Callable[[float], float]


@dataclass(frozen=True)
class MaterialPreset:
    """Dimensional material and apparatus data (SI units)."""

    gamma0: float
    rho_l: float
    H: float
    d: float
    R: float
    R0: float
    epsilon: float = EPSILON_0
    g_accel: float = G_ACCEL

    def __post_init__(self):
        for name in ("gamma0", "rho_l", "H", "d", "R", "R0", "epsilon", "g_accel"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive number, got {value!r}")
        if not self.R0 < self.R:
            raise ConfigError("nucleation radius R0 must be smaller than the capillary radius R")
        if not self.R < self.d:
            raise ConfigError("capillary radius R must be smaller than the plate distance d")


_TABLE = dict(gamma0=2.01e-2, rho_l=930.0, H=2.0e-3, d=1.0e-2, R0=1.49e-7)
PRESETS = {
    "large": MaterialPreset(R=0.745e-3, **_TABLE),
    "small": MaterialPreset(R=0.745e-6, **_TABLE),
}


@dataclass(frozen=True)
class MeniscusProblem:
    """Dimensionless groups driving the profile equation."""

    k1: float
    k2: float
    k3: float
    d_hat: float
    r0_hat: float
    alpha: float = 1.0
    kind: TensionLaw = TensionLaw.CONSTANT

    def __post_init__(self):
        object.__setattr__(self, "kind", TensionLaw(self.kind))
        if min(self.k1, self.k2, self.k3) < 0:
            raise ConfigError("k1, k2, k3 must be non-negative")
        if not self.d_hat > 1:
            raise ConfigError("plate must lie beyond one capillary radius")
        if not 0 < self.r0_hat < 1:
            raise ConfigError("r0_hat must lie in (0, 1)")
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")


def derive_problem(preset: MaterialPreset, U0: float, kind=TensionLaw.CONSTANT,
                   alpha: float = 1.0) -> MeniscusProblem:
    p = preset
    return MeniscusProblem(
        k1=p.rho_l * p.g_accel * p.R**2 / p.gamma0,
        k2=p.H / p.R,
        k3=p.epsilon * U0**2 / (p.gamma0 * p.R),
        d_hat=p.d / p.R,
        r0_hat=p.R0 / p.R,
        alpha=alpha,
        kind=TensionLaw(kind),
    )


@dataclass
class MeniscusProfile:
    r: np.ndarray
    z: np.ndarray
    dz_dr: np.ndarray
    sigma_hat: np.ndarray
    gamma_hat: np.ndarray
    z_m: float
    residual: float

    def check_invariants(self, residual_tol: float = RESIDUAL_TOL, slack: float = 1e-9) -> None:
        """Raise ``AssertionError`` when the profile violates its contract."""
        if len(self.r) < 200:
            raise AssertionError("profile has fewer than 200 samples")
        if not np.all(np.isfinite(self.z)) or not np.all(np.isfinite(self.dz_dr)):
            raise AssertionError("non-finite profile values")
        if self.residual > residual_tol:
            raise AssertionError(f"z(1) = {self.residual:g} exceeds tolerance")
        if self.dz_dr[0] != 0.0:
            raise AssertionError("slope at the axis must vanish")
        if np.any(np.diff(self.z) > slack):
            raise AssertionError("profile is not monotone non-increasing")
        if not 0 <= self.z_m <= ZM_HI:
            raise AssertionError("tip height outside the admissible range")

    def rows(self):
        return zip(self.r, self.z, self.dz_dr, self.sigma_hat, self.gamma_hat)


@dataclass
class SolveReport:
    converged: bool
    shots: int
    tolman_iterations: int = 0
    delta_zm_last: float = 0.0
    branch_note: str = ""
    zm_history: tuple = ()


# --------------------------------------------------------------------------- curvature

def total_curvature(zp: float, zpp: float, r: float) -> float:
    """Signed sum of principal curvatures of the surface of revolution ``z(r)``."""
    if r < 0:
        raise DomainError("radius must be non-negative")
    if r == 0:
        if zp != 0:
            raise DomainError("slope must vanish on the axis")
        return 2.0 * zpp
    w = 1.0 + zp * zp
    return zpp / (w * math.sqrt(w)) + zp / (r * math.sqrt(w))


def curvature_radius(kappa_tot: float) -> float:
    """Tension-law argument ``R_g = 1/|kappa_tot|`` (``inf`` for a flat surface).

    This is the radius for which the capillary pressure reads ``g(R_g)/R_g``.
    """
    return math.inf if kappa_tot == 0 else 1.0 / abs(kappa_tot)


def parabola_curvature_radius(r: float, z_m: float) -> float:
    """``R_g`` on the tip-matched parabola ``z_m (1 - r^2)``."""
    zp = -2.0 * z_m * r
    return curvature_radius(total_curvature(zp, -2.0 * z_m, r))


def frozen_tension(kind, z_m: float, r0_hat: float, alpha: float = 1.0) -> GammaFn:
    """Tension coefficient ``T(r)`` frozen on the parabola of tip height ``z_m``."""
    kind = TensionLaw(kind)
    if kind is TensionLaw.CONSTANT or z_m <= 0:
        return _unit_tension

    def tension(r: float) -> float:
        return float(normalized_tension(kind, parabola_curvature_radius(r, z_m), r0_hat, alpha))

    return tension


def _unit_tension(r: float) -> float:
    return 1.0


# --------------------------------------------------------------------------- ODE

def _pressure(problem: MeniscusProblem, r: float, z: float, field_zm: float) -> float:
    p = problem.k1 * (problem.k2 + z)
    if problem.k3 > 0:
        e = surface_field(r, z, field_zm, problem.d_hat)
        p += 0.5 * problem.k3 * e * e
    return p


def normal_form_rhs(r: float, z: float, zp: float, problem: MeniscusProblem,
                    gamma_fn: GammaFn | None = None, field_zm: float | None = None) -> float:
    """``z''`` from the normal balance at ``(r, z, z')``."""
    g = (gamma_fn or _unit_tension)(r)
    if g <= MIN_TENSION:
        raise SingularTension(f"tension {g:g} at r={r:g}")
    if problem.k3 > 0 and not (field_zm and field_zm > 0):
        raise DomainError("charged problems need a positive field tip height")
    p = _pressure(problem, r, z, field_zm)
    if r == 0:
        if zp != 0:
            raise DomainError("slope must vanish on the axis")
        return -p / (2.0 * g)
    w = 1.0 + zp * zp
    return -w * math.sqrt(w) * p / g - w * zp / r


class _Runaway(Exception):
    def __init__(self, r, z, zp):
        super().__init__(r, z, zp)
        self.r, self.z, self.zp = r, z, zp


def _rhs_factory(problem, gamma_fn, field_zm):
    """Specialized ``(z', z'')`` with the field constants hoisted out of the loop.

    Same formula as :func:`normal_form_rhs`.
    """
    k1, k2, half_k3 = problem.k1, problem.k2, 0.5 * problem.k3
    sqrt, hypot = math.sqrt, math.hypot
    charged = half_k3 > 0
    if charged:
        two_zm = 2.0 * field_zm
        k_field = gap_constant(field_zm, problem.d_hat) / sqrt(two_zm)
    constant = gamma_fn is _unit_tension

    def rhs(r, y):
        z, zp = y[0], y[1]
        # trial stages may overshoot far past the terminal event
        if not (abs(z) < 10 * Z_ESCAPE and abs(zp) < 10 * SLOPE_ESCAPE):
            raise _Runaway(r, z, zp)
        p = k1 * (k2 + z)
        if charged:
            eta2 = r * r / (hypot(z, r) + z) if z > 0 else hypot(z, r) - z
            p += half_k3 * k_field * k_field / (two_zm + eta2)
        g = 1.0 if constant else gamma_fn(r)
        if g <= MIN_TENSION:
            raise SingularTension(f"tension {g:g} at r={r:g}")
        w = 1.0 + zp * zp
        return (zp, -w * sqrt(w) * p / g - w * zp / r)

    return rhs


def _runaway_residual(z: float) -> float:
    if not math.isfinite(z) or abs(z) >= Z_ESCAPE:
        return math.copysign(Z_ESCAPE, z) if not math.isnan(z) else Z_ESCAPE
    return z


def _escape(r, y):
    return min(Z_ESCAPE - abs(y[0]), SLOPE_ESCAPE - abs(y[1]))


def _escape_residual(traj: Trajectory) -> float:
    z_e = float(traj.y_end[0])
    if abs(z_e) >= Z_ESCAPE * (1 - 1e-6):
        return math.copysign(Z_ESCAPE, z_e)
    # profile turned vertical: it would meet the pipet plane at about this height
    return z_e


def integrate_profile(zm_guess: float, problem: MeniscusProblem, gamma_fn: GammaFn | None = None,
                      tol: ToleranceSpec | None = None) -> tuple[Trajectory, float]:
    """Integrate from the axis with tip height ``zm_guess``; return ``(trajectory, z(1))``.

    Raises
    ------
    Diverged
        If ``|z| > 2`` or ``|z'| > 1e3`` before ``r = 1``. The exception carries
        a signed residual surrogate usable for bracketing.
    """
    if not 0 < zm_guess < 2:
        raise DomainError("tip height guess must lie in (0, 2)")
    gamma_fn = gamma_fn or _unit_tension
    zpp0 = normal_form_rhs(0.0, zm_guess, 0.0, problem, gamma_fn, zm_guess)
    y0 = (zm_guess + 0.5 * zpp0 * R_EPS**2, zpp0 * R_EPS)
    try:
        traj = integrate_ivp(_rhs_factory(problem, gamma_fn, zm_guess), (R_EPS, 1.0), y0,
                             tol or SOLVE_TOL, stop=_escape)
    except _Runaway as exc:
        raise Diverged(f"profile ran away at r={exc.r:.4g}", _runaway_residual(exc.z), exc.r)
    if traj.stopped:
        res = _escape_residual(traj)
        raise Diverged(f"profile escaped at r={traj.t_end:.4g}", res, traj.t_end)
    return traj, float(traj.y_end[0])


@dataclass
class _Shot:
    zm: float
    residual: float
    ok: bool
    traj: Trajectory | None = None


class _Shooter:
    """Caches shots for one (problem, tension) pair and counts integrations."""

    def __init__(self, problem, gamma_fn, tol):
        self.problem = problem
        self.gamma_fn = gamma_fn or _unit_tension
        self.tol = tol or SOLVE_TOL
        self.count = 0

    def __call__(self, zm: float, coarse: bool = False) -> _Shot:
        self.count += 1
        tol = SCAN_TOL if coarse and SCAN_TOL.rel_tol > self.tol.rel_tol else self.tol
        try:
            traj, res = integrate_profile(zm, self.problem, self.gamma_fn, tol)
        except Diverged as exc:
            return _Shot(zm, exc.residual, False)
        return _Shot(zm, res, True, traj)


def _scan_grid(lo: float = ZM_LO, hi: float = ZM_HI) -> np.ndarray:
    grid = np.concatenate([np.geomspace(lo, 0.02, 12), np.arange(0.02, hi, 0.04), [hi]])
    return np.unique(grid)


def _find_tip(shooter: _Shooter, seed: float | None) -> _Shot:
    grid = _scan_grid()
    cache: dict[int, _Shot] = {}

    def at(i):
        if i not in cache:
            cache[i] = shooter(float(grid[i]), coarse=True)
        return cache[i]

    order = list(range(len(grid) - 1))
    if seed is not None:
        order.sort(key=lambda i: abs(0.5 * (grid[i] + grid[i + 1]) - seed))
    for i in order:
        a, b = at(i), at(i + 1)
        if a.residual * b.residual > 0 or not (a.ok or b.ok):
            continue
        try:
            root = bisect(lambda z: shooter(z).residual, a.zm, b.zm, _ROOT_TOL)
        except NoBracket:
            continue
        final = shooter(root)
        if final.ok and abs(final.residual) <= RESIDUAL_TOL:
            return final
    raise NoSolution(f"no equilibrium tip height in ({ZM_LO:g}, {ZM_HI:g}]")


def _sample(problem, gamma_fn, z_m, traj, residual) -> MeniscusProfile:
    gamma_fn = gamma_fn or _unit_tension
    r = np.linspace(0.0, 1.0, N_PROFILE)
    zpp0 = normal_form_rhs(0.0, z_m, 0.0, problem, gamma_fn, z_m)
    inner = r < R_EPS
    z = np.empty_like(r)
    zp = np.empty_like(r)
    z[inner] = z_m + 0.5 * zpp0 * r[inner] ** 2
    zp[inner] = zpp0 * r[inner]
    states = np.asarray(traj(r[~inner]))
    z[~inner], zp[~inner] = states[0], states[1]
    gamma_hat = np.array([gamma_fn(ri) for ri in r])
    profile = MeniscusProfile(r=r, z=z, dz_dr=zp, sigma_hat=np.zeros_like(r),
                              gamma_hat=gamma_hat, z_m=z_m, residual=abs(residual))
    profile.sigma_hat = surface_charge(profile, problem)
    return profile


def shoot(problem: MeniscusProblem, gamma_fn: GammaFn | None = None, seed: float | None = None,
          tol: ToleranceSpec | None = None) -> tuple[MeniscusProfile, SolveReport]:
    """Shoot from the axis on the tip height until ``|z(1)| <= 1e-4``.

    Candidate brackets are scanned in increasing tip height (or outward from
    ``seed`` for continuation), so the lowest equilibrium branch is returned.

    Raises
    ------
    NoSolution
        No sign change of ``z(1)`` with a regular trajectory exists.
    """
    shooter = _Shooter(problem, gamma_fn, tol)
    shot = _find_tip(shooter, seed)
    profile = _sample(problem, gamma_fn, shot.zm, shot.traj, shot.residual)
    note = "beyond limit height (z_m > 1)" if shot.zm > 1 else ""
    return profile, SolveReport(converged=True, shots=shooter.count, branch_note=note,
                                zm_history=(shot.zm,))


# --------------------------------------------------------------------------- reverse shooting

def _reverse(problem, gamma_fn, field_zm, slope, tol):
    """Integrate from the pipet edge to ``R_EPS``; return (traj, axis slope defect, diverged)."""
    try:
        traj = integrate_ivp(_rhs_factory(problem, gamma_fn, field_zm), (1.0, R_EPS),
                             (0.0, slope), tol, stop=_escape)
    except _Runaway as exc:
        return None, math.copysign(SLOPE_ESCAPE, exc.zp if abs(exc.zp) > 1 else -exc.z), True
    z_e, zp_e = float(traj.y_end[0]), float(traj.y_end[1])
    if traj.stopped:
        return traj, math.copysign(SLOPE_ESCAPE, zp_e if abs(zp_e) > 1 else -z_e), True
    zpp_axis = normal_form_rhs(0.0, z_e, 0.0, problem, gamma_fn, field_zm)
    return traj, zp_e - zpp_axis * R_EPS, False


_SLOPES = (0.0, -1e-6, -1e-5, -1e-4, -1e-3, -1e-2, -0.03, -0.1, -0.3, -0.6, -1.0, -1.5, -2.0,
           -3.0, -5.0, -8.0, -13.0, -20.0, -35.0, -60.0, -100.0, -200.0, -400.0, -999.0)


def _reverse_for_field(problem, gamma_fn, field_zm, tol, hint=None):
    """Edge slope giving a regular axis for a fixed field tip height."""
    def defect(s):
        return _reverse(problem, gamma_fn, field_zm, s, tol)[1]

    def polish(lo, hi):
        root = bisect(defect, lo, hi, _REVERSE_TOL)
        traj, d, bad = _reverse(problem, gamma_fn, field_zm, root, tol)
        if not bad and abs(d) <= RESIDUAL_TOL:
            return root, traj
        return None

    if hint is not None and hint < 0:
        # continuation: nearby field heights have nearby edge slopes
        for width in (1e-4, 1e-2, 0.1):
            lo, hi = (1 + width) * hint, (1 - width) * hint
            if defect(lo) * defect(hi) <= 0:
                found = polish(lo, hi)
                if found:
                    return found
    prev_s, prev = _SLOPES[0], defect(_SLOPES[0])
    for s in _SLOPES[1:]:
        cur = defect(s)
        # both ends usually diverge: the axis mode blows up on either side of the root
        if prev * cur <= 0:
            found = polish(s, prev_s)
            if found:
                return found
        prev_s, prev = s, cur
    raise NoSolution("no edge slope yields a regular axis")


def _axis_height(problem, gamma_fn, traj):
    z_e = float(traj.y_end[0])
    zpp = normal_form_rhs(0.0, z_e, 0.0, problem, gamma_fn, max(z_e, ZM_LO))
    return z_e - 0.5 * zpp * R_EPS**2


def shoot_reverse(problem: MeniscusProblem, gamma_fn: GammaFn | None = None,
                  seed: float | None = None, tol: ToleranceSpec | None = None) -> MeniscusProfile:
    """Shoot from the pipet edge on the edge slope until the axis slope vanishes.

    The field's tip height is made self-consistent with the arrival height by
    bracketing outward from ``seed`` (default: small-deflection estimate)
    and refining with Brent's method.
    """
    gamma_fn = gamma_fn or _unit_tension
    tol = tol or SOLVE_TOL
    if problem.k3 == 0:
        slope, traj = _reverse_for_field(problem, gamma_fn, 1.0, tol)
        z_m = _axis_height(problem, gamma_fn, traj)
    else:
        hint = [None]

        def mismatch(f):
            try:
                slope, tr = _reverse_for_field(problem, gamma_fn, f, tol, hint[0])
            except NoSolution:
                return 10.0  # field too strong for any regular profile; finite for brentq
            hint[0] = slope
            return _axis_height(problem, gamma_fn, tr) - f

        lo = hi = seed if seed else max(problem.k1 * problem.k2 / 4.0, 0.05)
        if seed:
            lo, hi = seed * 0.98, seed * 1.02
        m_lo = m_hi = mismatch(lo)
        if hi != lo:
            m_hi = mismatch(hi)
        while m_hi > 0:
            lo, m_lo = hi, m_hi
            hi *= 1.25
            if hi > ZM_HI * 1.25:
                raise NoSolution("reverse shooting found no self-consistent tip height")
            m_hi = mismatch(hi)
        while m_lo < 0:
            hi, m_hi = lo, m_lo
            lo /= 1.25
            if lo < ZM_LO:
                raise NoSolution("reverse shooting found no self-consistent tip height")
            m_lo = mismatch(lo)
        z_m = bisect(mismatch, lo, hi, _REVERSE_TOL) if lo != hi else lo
        slope, traj = _reverse_for_field(problem, gamma_fn, z_m, tol, hint[0])
    field_zm = max(z_m, ZM_LO)
    r = np.linspace(0.0, 1.0, N_PROFILE)
    inner = r < R_EPS
    zpp0 = normal_form_rhs(0.0, z_m, 0.0, problem, gamma_fn, field_zm)
    z = np.empty_like(r)
    zp = np.empty_like(r)
    z[inner] = z_m + 0.5 * zpp0 * r[inner] ** 2
    zp[inner] = zpp0 * r[inner]
    states = np.asarray(traj(r[~inner]))
    z[~inner], zp[~inner] = states[0], states[1]
    z[-1], zp[-1] = 0.0, slope
    profile = MeniscusProfile(r=r, z=z, dz_dr=zp, sigma_hat=np.zeros_like(r),
                              gamma_hat=np.array([gamma_fn(ri) for ri in r]), z_m=z_m,
                              residual=0.0)
    if problem.k3 > 0:
        profile.sigma_hat = surface_charge(profile, problem)
    return profile


def back_integration_check(profile: MeniscusProfile, problem: MeniscusProblem,
                           gamma_fn: GammaFn | None = None, tol: ToleranceSpec | None = None) -> float:
    """Re-integrate from the arrival point ``r = 1`` back to the axis; max ``|dz|`` on the grid."""
    gamma_fn = gamma_fn or _unit_tension
    if problem.k1 * problem.k2 == 0 and problem.k3 == 0 and np.all(profile.dz_dr == 0):
        return 0.0
    field_zm = profile.z_m if profile.z_m > 0 else ZM_LO
    traj = integrate_ivp(_rhs_factory(problem, gamma_fn, field_zm), (1.0, R_EPS),
                         (profile.z[-1], profile.dz_dr[-1]), tol or SOLVE_TOL)
    mask = profile.r >= R_EPS
    back = np.asarray(traj(profile.r[mask]))[0]
    return float(np.max(np.abs(back - profile.z[mask])))


# --------------------------------------------------------------------------- Tolman iteration

def solve_tolman(problem: MeniscusProblem, seed: float | None = None,
                 tol: ToleranceSpec | None = None, max_iter: int = 5,
                 stationarity: float = 0.005) -> tuple[MeniscusProfile, SolveReport]:
    """Frozen-coefficient iteration for curvature-dependent tension.

    The constant-tension solution gives a first tip height; the tension is
    then frozen on the parabola of that height and the profile re-solved,
    repeating until the relative change of the tip height is below
    ``stationarity`` or ``max_iter`` re-solves were made.
    """
    if problem.kind is TensionLaw.CONSTANT:
        return shoot(problem, None, seed, tol)
    shots = 0
    try:
        profile, rep = shoot(problem, None, seed, tol)
        z_m, shots = profile.z_m, rep.shots
    except NoSolution:
        if seed is None:
            raise
        z_m = seed
    history = [z_m]
    delta = math.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        tension = frozen_tension(problem.kind, z_m, problem.r0_hat, problem.alpha)
        try:
            profile, rep = shoot(problem, tension, seed=z_m, tol=tol)
        except NoSolution as exc:
            raise NoSolution(f"{problem.kind.value}: no equilibrium after freezing tension "
                             f"(iteration {iterations})") from exc
        shots += rep.shots
        delta = abs(profile.z_m - z_m) / z_m
        z_m = profile.z_m
        history.append(z_m)
        if delta < stationarity:
            break
    note = "beyond limit height (z_m > 1)" if z_m > 1 else ""
    return profile, SolveReport(converged=delta < stationarity, shots=shots,
                                tolman_iterations=iterations, delta_zm_last=delta,
                                branch_note=note, zm_history=tuple(history))


def solve(problem: MeniscusProblem, seed: float | None = None,
          tol: ToleranceSpec | None = None) -> tuple[MeniscusProfile, SolveReport]:
    """Dispatch on the tension law: plain shooting or the frozen-tension iteration."""
    return solve_tolman(problem, seed, tol)


# --------------------------------------------------------------------------- derived quantities

def surface_charge(profile: MeniscusProfile, problem: MeniscusProblem) -> np.ndarray:
    """Normalized charge density ``sqrt(k3) * E`` on the profile grid."""
    if problem.k3 == 0:
        return np.zeros_like(profile.r)
    root_k3 = math.sqrt(problem.k3)
    return np.array([root_k3 * surface_field(r, z, profile.z_m, problem.d_hat)
                     for r, z in zip(profile.r, profile.z)])


@dataclass(frozen=True)
class LimitResult:
    U_lim: float
    z_m: float
    bracket: tuple[float, float]


def limit_potential(preset: MaterialPreset, kind=TensionLaw.CONSTANT, U_lo: float = 0.0,
                    U_hi: float = 1e4, alpha: float = 1.0, resolution: float = 1.0,
                    tol: ToleranceSpec | None = None) -> LimitResult:
    """Largest potential with an equilibrium of tip height at most one capillary radius.

    Bisection on the potential; each probe is seeded with the last admissible
    tip height so the physical branch is followed.
    """
    kind = TensionLaw(kind)

    def attempt(U, seed):
        try:
            prof, _ = solve(derive_problem(preset, U, kind, alpha), seed, tol)
        except NoSolution:
            return False, None
        return prof.z_m <= 1.0, prof.z_m

    ok, z_lo = attempt(U_lo, None)
    if not ok:
        raise BadBracket(f"no admissible meniscus at U_lo={U_lo:g} V")
    ok_hi, _ = attempt(U_hi, z_lo)
    if ok_hi:
        raise BadBracket(f"meniscus still admissible at U_hi={U_hi:g} V")
    lo, hi = U_lo, U_hi
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        ok, z = attempt(mid, z_lo)
        if ok:
            lo, z_lo = mid, z
        else:
            hi = mid
    return LimitResult(U_lim=lo, z_m=z_lo, bracket=(lo, hi))


@dataclass
class SweepResult:
    U: list
    kinds: list
    cells: dict = field(default_factory=dict)  # (U, kind) -> z_m or None
    errors: dict = field(default_factory=dict)  # (U, kind) -> message
    beyond: set = field(default_factory=set)  # converged cells with z_m > 1

    def column(self, kind) -> list[tuple[float, float]]:
        kind = TensionLaw(kind)
        return [(U, self.cells[(U, kind)]) for U in self.U if self.cells.get((U, kind)) is not None]

    def rows(self):
        for U in self.U:
            yield U, [self.cells.get((U, k)) for k in self.kinds]


def sweep(preset: MaterialPreset, U_list: Sequence[float], kinds: Iterable = (TensionLaw.CONSTANT,),
          alpha: float = 1.0, tol: ToleranceSpec | None = None) -> SweepResult:
    """Tip heights over a grid of potentials and laws, with continuation in ``U``.

    Cells without an equilibrium are stored as ``None`` and their reason in
    ``errors``; nothing is raised. Converged cells whose tip rose above the
    pipet radius are kept but listed in ``beyond``.
    """
    kinds = [TensionLaw(k) for k in kinds]
    result = SweepResult(U=list(U_list), kinds=kinds)
    for kind in kinds:
        seed = None
        for U in sorted(set(result.U)):
            try:
                prof, _ = solve(derive_problem(preset, U, kind, alpha), seed, tol)
            except (NoSolution, Diverged) as exc:
                result.cells[(U, kind)] = None
                result.errors[(U, kind)] = str(exc)
                continue
            result.cells[(U, kind)] = prof.z_m
            if prof.z_m > 1.0:
                result.beyond.add((U, kind))
            seed = prof.z_m
    return result


def quadratic_check(column: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Fit ``z_m = a + b U^2``; returns ``(a, b, rms_rel_residual)``."""
    if len(column) < 4:
        raise ValueError("need at least four rows")
    return fit_quadratic(column)
