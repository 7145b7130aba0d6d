"""Numerical kernels: IVP integration, bracketed roots, scalar minimization and fits.

These are thin wrappers around SciPy/NumPy that fix the tolerance conventions
used throughout the package and translate solver failures into the package's
exception types.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import NoBracket, SingularFit, StepFailure

__all__ = [
    "ToleranceSpec",
    "Trajectory",
    "ScalarFit",
    "integrate_ivp",
    "bisect",
    "minimize_scalar",
    "fit_scalar",
    "fit_quadratic",
]

MIN_SAMPLES = 256


@dataclass(frozen=True)
class ToleranceSpec:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class Trajectory:
    """Sampled IVP solution with dense interpolation.

    ``t`` is strictly monotone in the direction of integration (increasing
    independent variable after :meth:`ordered`), ``y`` has shape ``(len(t), n)``.
    ``t_end``/``y_end`` hold the exact final accepted state, which differs from
    the requested end point when a stop condition fired.
    """

    t: np.ndarray
    y: np.ndarray
    t_end: float
    y_end: np.ndarray
    stopped: bool
    _sol: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        """Interpolated state at ``t`` (scalar or array); shape ``(n,)`` or ``(n, m)``."""
        return self._sol(t)

    @property
    def t0(self) -> float:
        return float(self.t[0])


def integrate_ivp(
    rhs: Callable[[float, np.ndarray], Sequence[float]],
    span: tuple[float, float],
    y0: Sequence[float],
    tol: ToleranceSpec | None = None,
    stop: Callable[[float, np.ndarray], float] | None = None,
    n_samples: int = MIN_SAMPLES,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` over ``span`` with an embedded RK 5(4) pair.

    Parameters
    ----------
    rhs : callable
        Right-hand side ``f(t, y)``.
    span : (t0, t1)
        Integration interval; ``t1 < t0`` integrates backwards.
    y0 : array_like
        Initial state at ``t0``.
    tol : ToleranceSpec, optional
        Local error per step is kept below ``abs_tol + rel_tol * |y|``.
    stop : callable, optional
        Terminal event ``g(t, y)``; integration halts where ``g`` crosses zero.
    n_samples : int
        Number of uniformly spaced samples stored on the trajectory.

    Raises
    ------
    StepFailure
        If the step size collapses (singular right-hand side).
    """
    tol = tol or ToleranceSpec()
    t0, t1 = float(span[0]), float(span[1])
    if t0 == t1:
        raise ValueError("empty integration span")
    events = None
    if stop is not None:
        def event(t, y):
            return stop(t, y)
        event.terminal = True
        events = [event]
    sol = integrate.solve_ivp(
        rhs,
        (t0, t1),
        np.asarray(y0, dtype=float),
        method="RK45",
        rtol=tol.rel_tol,
        atol=tol.abs_tol,
        dense_output=True,
        events=events,
        first_step=min(abs(t1 - t0) * 1e-3, 1e-3),
    )
    if sol.status == -1:
        raise StepFailure(sol.message)
    t_end = float(sol.t[-1])
    y_end = sol.y[:, -1].copy()
    if not np.all(np.isfinite(y_end)):
        raise StepFailure("non-finite state")
    n = max(int(n_samples), 2)
    if t_end == t0:
        grid = np.array([t0, t0])
        ys = np.stack([np.asarray(y0, float), y_end])
    else:
        grid = np.linspace(t0, t_end, n)
        ys = sol.sol(grid).T
        ys[0] = np.asarray(y0, float)
        ys[-1] = y_end
    return Trajectory(
        t=grid, y=ys, t_end=t_end, y_end=y_end,
        stopped=sol.status == 1, _sol=sol.sol,
    )


def bisect(f: Callable[[float], float], lo: float, hi: float,
           tol: ToleranceSpec | None = None) -> float:
    """Root of ``f`` inside ``[lo, hi]`` by a safeguarded bracketing method (Brent).

    The returned value always lies inside the initial bracket.
    """
    tol = tol or ToleranceSpec()
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise NoBracket(f"f({lo})={flo:g} and f({hi})={fhi:g} have the same sign")
    x = optimize.brentq(f, lo, hi, xtol=tol.abs_tol, rtol=max(tol.rel_tol, 4.5e-16),
                        maxiter=tol.max_iter)
    return min(max(x, min(lo, hi)), max(lo, hi))


def minimize_scalar(f: Callable[[float], float], lo: float, hi: float,
                    tol: ToleranceSpec | None = None) -> float:
    """Argmin of a unimodal ``f`` on ``[lo, hi]``.

    Unimodality is the caller's responsibility. Uses bounded Brent search
    (golden section with parabolic acceleration); the end points themselves
    are also compared so a minimum sitting on the boundary is returned exactly.
    """
    tol = tol or ToleranceSpec()
    res = optimize.minimize_scalar(
        f, bounds=(lo, hi), method="bounded",
        options={"xatol": tol.abs_tol, "maxiter": tol.max_iter},
    )
    x = float(res.x)
    fx = float(res.fun)
    for edge in (lo, hi):
        fe = f(edge)
        if fe < fx:
            x, fx = edge, fe
    return x


@dataclass(frozen=True)
class ScalarFit:
    theta: float
    sse: float
    degenerate: bool


def fit_scalar(model: Callable[[float], Sequence[float]], target: Sequence[float],
               theta_lo: float, theta_hi: float,
               tol: ToleranceSpec | None = None) -> ScalarFit:
    """One-parameter least squares: minimize ``||model(theta) - target||^2``.

    A model that does not depend on ``theta`` is reported as degenerate and
    the midpoint of the range is returned.
    """
    target = np.asarray(target, dtype=float)

    def sse(theta):
        resid = np.asarray(model(theta), dtype=float) - target
        if resid.shape != target.shape:
            raise ValueError("model output and target differ in length")
        return float(resid @ resid)

    probes = np.linspace(theta_lo, theta_hi, 5)
    values = np.array([sse(p) for p in probes])
    scale = max(float(np.max(np.abs(values))), 1e-300)
    if np.ptp(values) <= 1e-12 * scale:
        mid = 0.5 * (theta_lo + theta_hi)
        return ScalarFit(theta=mid, sse=sse(mid), degenerate=True)
    theta = minimize_scalar(sse, theta_lo, theta_hi, tol)
    return ScalarFit(theta=theta, sse=sse(theta), degenerate=False)


def fit_quadratic(points: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Fit ``v = a + b*u**2`` by linear least squares.

    Returns ``(a, b, rms_rel_residual)`` where the residual is the RMS of
    ``(fit - v) / max(|v|, 1e-12)``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (u, v) points")
    u2 = pts[:, 0] ** 2
    v = pts[:, 1]
    if np.ptp(u2) == 0:
        raise SingularFit("all abscissae have the same |u|")
    design = np.column_stack([np.ones_like(u2), u2])
    (a, b), *_ = np.linalg.lstsq(design, v, rcond=None)
    rel = (design @ np.array([a, b]) - v) / np.maximum(np.abs(v), 1e-12)
    return float(a), float(b), float(np.sqrt(np.mean(rel**2)))
