"""Curvature-dependent surface-tension laws.

Four laws are supported, labelled ``g0``..``g3`` on the command line:

* ``constant``         gamma = gamma0
* ``exponential``      gamma = gamma0 (1 - exp(-R/R0))
* ``tanh_increasing``  gamma = gamma0/2 [1 + tanh((R - R0)/(alpha R0))]
* ``tanh_decreasing``  gamma = gamma0/2 [3 - tanh((R - R0)/R0)]

The decreasing law has its width fixed to one; ``alpha`` is ignored for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

VALIDITY_FLOOR = 1e-3


class TensionLaw(str, Enum):
    CONSTANT = "constant"
    EXPONENTIAL = "exponential"
    TANH_INCREASING = "tanh_increasing"
    TANH_DECREASING = "tanh_decreasing"

    @property
    def flag(self) -> str:
        return FLAGS_BY_LAW[self]

    @classmethod
    def parse(cls, text: str) -> "TensionLaw":
        """Accept either a law name or a ``g0``..``g3`` flag."""
        key = str(text).strip().lower()
        if key in LAWS_BY_FLAG:
            return LAWS_BY_FLAG[key]
        return cls(key)


LAWS_BY_FLAG = {
    "g0": TensionLaw.CONSTANT,
    "g1": TensionLaw.EXPONENTIAL,
    "g2": TensionLaw.TANH_INCREASING,
    "g3": TensionLaw.TANH_DECREASING,
}
FLAGS_BY_LAW = {law: flag for flag, law in LAWS_BY_FLAG.items()}


def normalized_tension(kind, x, r0_hat, alpha=1.0):
    """Dimensionless tension ``gamma/gamma0`` at curvature radius ``x``.

    ``x`` and ``r0_hat`` are expressed in the same (arbitrary) length unit.
    Works elementwise on arrays.
    """
    kind = TensionLaw(kind)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("curvature radius must be positive")
    if not r0_hat > 0:
        raise DomainError("nucleation radius must be positive")
    s = x / r0_hat
    if kind is TensionLaw.CONSTANT:
        out = np.ones_like(s)
    elif kind is TensionLaw.EXPONENTIAL:
        out = -np.expm1(-s)
    elif kind is TensionLaw.TANH_INCREASING:
        if not alpha > 0:
            raise DomainError("alpha must be positive")
        out = 0.5 * (1.0 + np.tanh((s - 1.0) / alpha))
    else:
        out = 0.5 * (3.0 - np.tanh(s - 1.0))
    return out[()] if out.ndim == 0 else out


def outside_validity(x, r0_hat) -> bool:
    """True when any radius falls below ``1e-3 * R0``, where the laws are not meant to apply."""
    return bool(np.any(np.asarray(x, dtype=float) < VALIDITY_FLOOR * r0_hat))


@dataclass(frozen=True)
class TolmanModel:
    """A tension law with its dimensional parameters (SI units)."""

    kind: TensionLaw
    gamma0: float
    R0: float
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", TensionLaw(self.kind))
        if not (self.gamma0 > 0 and self.R0 > 0 and self.alpha > 0):
            raise DomainError("gamma0, R0 and alpha must be positive")

    def surface_tension(self, R_g):
        """Surface tension in N/m at mean curvature radius ``R_g`` (m)."""
        return self.gamma0 * normalized_tension(self.kind, R_g, self.R0, self.alpha)


def surface_tension(model: TolmanModel, R_g):
    return model.surface_tension(R_g)
