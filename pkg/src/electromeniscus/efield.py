"""Electrostatics between homofocal parabolas.

Lengths are in units of the capillary radius and the potential drop is
normalized to one, so every field returned here is a positive magnitude that
must be multiplied by ``U0/R`` to obtain volts per metre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ParabolicPoint:
    zeta: float
    eta: float

    def __post_init__(self):
        if self.zeta < 0 or self.eta < 0:
            raise DomainError("parabolic coordinates must be non-negative")


@dataclass(frozen=True)
class FieldGeometry:
    z_m: float
    d_hat: float

    def __post_init__(self):
        if not 0 < self.z_m < self.d_hat:
            raise DomainError("need 0 < z_m < d_hat")

    @property
    def far_plate(self) -> bool:
        # plate seen as a flat, distant parabola
        return self.d_hat >= 10.0 * self.z_m


def to_cylindrical(p: ParabolicPoint) -> tuple[float, float]:
    """``(z, r)`` of a point given in parabolic coordinates."""
    return 0.5 * (p.zeta**2 - p.eta**2), p.eta * p.zeta


def eta_squared(z: float, r: float) -> float:
    """Squared parabolic coordinate ``sqrt(z^2 + r^2) - z``, clamped at zero."""
    if z > 0:
        # rationalized form, free of cancellation near the positive axis
        return r * r / (math.hypot(z, r) + z)
    return max(math.hypot(z, r) - z, 0.0)


def zeta_from(z: float, eta2: float) -> float:
    return math.sqrt(max(2.0 * z + eta2, 0.0))


def homofocal_field(zeta: float, eta: float, k: float) -> float:
    """Field magnitude ``k / (sqrt(zeta^2 + eta^2) zeta)`` between two homofocal parabolas."""
    if zeta <= 0:
        raise DomainError("field is singular at zeta = 0")
    return k / (math.sqrt(zeta * zeta + eta * eta) * zeta)


def gap_constant(z_m: float, d_hat: float) -> float:
    """Normalized field constant ``2 / ln(d_hat / z_m)`` for unit potential drop."""
    if not 0 < z_m < d_hat:
        raise DomainError("need 0 < z_m < d_hat")
    return 2.0 / math.log(d_hat / z_m)


def surface_field(r: float, z: float, z_m: float, d_hat: float) -> float:
    """Normal field on the meniscus point ``(r, z)`` assuming the tip-height parabola."""
    if z_m <= 0:
        raise DomainError("tip height must be positive")
    k = gap_constant(z_m, d_hat)
    two_zm = 2.0 * z_m
    return k / (math.sqrt(two_zm + eta_squared(z, r)) * math.sqrt(two_zm))


def tip_field(z_m: float, d_hat: float) -> float:
    return 1.0 / (z_m * math.log(d_hat / z_m))
