import math

import pytest
from hypothesis import given, strategies as st

from electromeniscus.efield import (
    FieldGeometry,
    ParabolicPoint,
    eta_squared,
    gap_constant,
    homofocal_field,
    surface_field,
    tip_field,
    to_cylindrical,
    zeta_from,
)
from electromeniscus.errors import DomainError


@given(zeta=st.floats(0.01, 10), eta=st.floats(0, 10))
def test_coordinate_round_trip(zeta, eta):
    z, r = to_cylindrical(ParabolicPoint(zeta, eta))
    e2 = eta_squared(z, r)
    assert math.sqrt(e2) == pytest.approx(eta, rel=1e-9, abs=1e-9)
    assert zeta_from(z, e2) == pytest.approx(zeta, rel=1e-9)


def test_eta_on_positive_axis_is_zero():
    assert eta_squared(0.5, 0.0) == 0.0
    assert eta_squared(-1.0, 0.0) == pytest.approx(2.0)


def test_tip_field_consistency():
    zm, d = 0.4, 13.4228
    assert surface_field(0.0, zm, zm, d) == pytest.approx(tip_field(zm, d), rel=1e-14)


def test_field_weakens_along_parabola():
    zm, d = 0.6, 13.4228
    values = [surface_field(r, zm * (1 - r * r), zm, d) for r in (0, 0.25, 0.5, 0.75, 1.0)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_homofocal_formula():
    assert homofocal_field(1.0, 0.0, 2.0) == 2.0
    with pytest.raises(DomainError):
        homofocal_field(0.0, 1.0, 1.0)


def test_gap_constant():
    assert gap_constant(1.0, math.e**2) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        gap_constant(2.0, 1.0)


def test_geometry():
    assert FieldGeometry(0.5, 13.4).far_plate
    assert not FieldGeometry(0.5, 3.0).far_plate
    with pytest.raises(DomainError):
        FieldGeometry(0.0, 1.0)
    with pytest.raises(DomainError):
        ParabolicPoint(-1.0, 0.0)
