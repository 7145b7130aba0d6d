import math
import random

import numpy as np
import pytest
from scipy import optimize

from electromeniscus import variational as v
from electromeniscus.errors import DomainError, NoInteriorMinimum
from electromeniscus.meniscus import PRESETS, MeniscusProblem, derive_problem


def test_focus_offset():
    assert v.focus_offset(0.5) == 0.0
    assert v.focus_offset(0.25) == pytest.approx(0.75)
    for z in (0.1, 0.5, 0.9):
        assert v.ParabolicTrial(z).zeta0_sq == pytest.approx(1 / (2 * z))
    with pytest.raises(DomainError):
        v.focus_offset(0.0)


def test_surface_energy_values():
    assert v.surface_energy(0.0) == 1.0
    assert v.surface_energy(0.5) == pytest.approx(1.218951, abs=1e-6)
    assert v.surface_energy(1.0) == pytest.approx(1.696723, abs=1e-6)
    assert v.surface_energy(1e-6) == pytest.approx(1.0 + 1e-12, abs=1e-15)


def test_surface_energy_increasing_convex():
    z = np.linspace(0.01, 1, 100)
    e = np.array([v.surface_energy(x) for x in z])
    assert np.all(np.diff(e) > 0)
    assert np.all(np.diff(e, 2) > 0)


def test_gravity_energy():
    assert v.gravity_energy(0.0, 0.3, 2.0) == 0.0
    assert v.gravity_energy(0.5, 0.0, 2.0) == 0.0
    assert v.gravity_energy(0.2, 0.25192, 2.68456) == pytest.approx(-0.069312, abs=1e-5)


def test_electric_energy():
    assert v.electric_energy(0.5, 0.0, 13.4, 0.3) == 0.0
    assert v.electric_energy(1.0, 17.89, 13.4228, 0.31) == pytest.approx(-0.87587, abs=1e-4)
    with pytest.raises(DomainError):
        v.electric_energy(14.0, 1.0, 13.4, 0.3)


def test_plate_capacitor_limit():
    k3, d, reff = 5.0, 13.4228, 0.31
    ratio = v.electric_energy(1e-6, k3, d, reff) * (-2 * d / (k3 * reff**2))
    assert ratio == pytest.approx(1.0, abs=1e-3)


def test_electric_energy_decreasing():
    z = np.linspace(0.01, 6.5, 200)
    e = [v.electric_energy(x, 3.0, 13.4228, 0.31) for x in z]
    assert np.all(np.diff(e) < 0)


def test_charge_identities():
    rng = random.Random(3)
    for _ in range(20):
        z, d, reff, k3 = rng.uniform(0.01, 1), rng.uniform(2, 30), rng.uniform(0.1, 0.9), rng.uniform(0, 50)
        q = v.total_charge(z, d, reff)
        assert abs(v.electric_energy(z, k3, d, reff)) == pytest.approx(k3 * q, rel=1e-14, abs=1e-300)
    d = 13.4228
    assert v.total_charge(0.5, d, 0.3) == pytest.approx(0.09 / math.log(2 * d), rel=1e-14)
    # same value from the focus-shifted form ln((d + h)/(z + h)) with h = 0
    assert v.total_charge(0.5, d, 0.3) == pytest.approx(0.09 / math.log(d / 0.5), rel=1e-14)


def test_minimize_uncharged_large():
    p = derive_problem(PRESETS["large"], 0.0)
    total = lambda z: v.energy(z, p, 0.31).total
    oracle = optimize.minimize_scalar(total, bounds=(0.05, 0.5), method="bounded",
                                      options={"xatol": 1e-12}).x
    z = v.minimize_energy(p, 0.31)
    assert z == pytest.approx(oracle, abs=1e-7)
    assert z == pytest.approx(0.184629, abs=1e-5)
    # within 10% of the shooting value 0.1834
    assert z == pytest.approx(0.1834, rel=0.10)


def test_minimize_small_deflection_oracle():
    p = derive_problem(PRESETS["small"], 0.0)
    assert v.minimize_energy(p, 0.31) == pytest.approx(p.k1 * p.k2 / 4, rel=1e-4)


def test_minimize_boundary_for_flat_problem():
    p = MeniscusProblem(k1=0, k2=0, k3=0, d_hat=13.4, r0_hat=0.2)
    assert v.minimize_energy(p, 0.31) == pytest.approx(v.ZM_MIN)


def test_minimum_rises_with_field():
    z = [v.minimize_energy(derive_problem(PRESETS["large"], U), 0.31) for U in (0, 1000, 2000, 3000)]
    assert all(b > a for a, b in zip(z, z[1:]))


def test_no_interior_minimum_above_limit():
    with pytest.raises(NoInteriorMinimum):
        v.minimize_energy(derive_problem(PRESETS["large"], 8000.0), 0.31)


def test_calibration_round_trip():
    U = [0, 1000, 2000, 3000, 4000]
    synth = list(zip(U, v.variational_curve(PRESETS["large"], U, 0.4)))
    cal = v.calibrate_reff(synth, PRESETS["large"])
    assert cal.reff_hat == pytest.approx(0.4, abs=1e-3)
    assert not cal.degenerate


def test_calibration_degenerate():
    cal = v.calibrate_reff([(0.0, 0.18)], PRESETS["large"])
    assert cal.degenerate
