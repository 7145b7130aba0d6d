import math

import numpy as np
import pytest

from electromeniscus import meniscus
from electromeniscus.errors import (
    BadBracket,
    ConfigError,
    Diverged,
    DomainError,
    NoSolution,
    SingularTension,
)
from electromeniscus.meniscus import (
    PRESETS,
    MaterialPreset,
    MeniscusProblem,
    derive_problem,
    normal_form_rhs,
    total_curvature,
)
from electromeniscus.tolman import TensionLaw

FLAT = MeniscusProblem(k1=0, k2=0, k3=0, d_hat=10, r0_hat=0.2)


def test_derive_problem_large():
    p = derive_problem(PRESETS["large"], 0.0)
    assert p.k1 == pytest.approx(0.25192, rel=1e-4)
    assert p.k2 == pytest.approx(2.68456, rel=1e-5)
    assert p.d_hat == pytest.approx(13.4228, rel=1e-5)
    assert p.k3 == 0


def test_derive_problem_small():
    p = derive_problem(PRESETS["small"], 400.0)
    assert p.k1 * p.k2 == pytest.approx(6.7627e-4, rel=1e-4)
    assert p.r0_hat == pytest.approx(0.2)
    assert p.k3 == pytest.approx(8.854e-12 * 400**2 / (2.01e-2 * 0.745e-6))


def test_preset_validation():
    with pytest.raises(ConfigError):
        MaterialPreset(gamma0=0.02, rho_l=930, H=2e-3, d=1e-2, R=1e-3, R0=2e-3)
    with pytest.raises(ConfigError):
        MaterialPreset(gamma0=-1, rho_l=930, H=2e-3, d=1e-2, R=1e-3, R0=1e-7)
    with pytest.raises(ConfigError):
        MeniscusProblem(k1=-1, k2=0, k3=0, d_hat=10, r0_hat=0.2)


def test_curvature_of_sphere():
    rho = 2.0
    for r in (0.3, 1.0, 1.7):
        z = math.sqrt(rho**2 - r**2)
        zp = -r / z
        zpp = -rho**2 / z**3
        assert total_curvature(zp, zpp, r) == pytest.approx(-2 / rho, rel=1e-12)


def test_curvature_axis_and_flat():
    assert total_curvature(0.0, -2 * 0.3, 0.0) == pytest.approx(-1.2)
    assert meniscus.curvature_radius(0.0) == math.inf
    assert meniscus.parabola_curvature_radius(0.0, 0.3) == pytest.approx(1 / 1.2)
    with pytest.raises(DomainError):
        total_curvature(0.1, 0.0, 0.0)


def test_rhs_axis_examples():
    p = derive_problem(PRESETS["large"], 0.0)
    assert normal_form_rhs(0.0, 0.1834, 0.0, p) == pytest.approx(-0.36125, abs=5e-5)
    assert normal_form_rhs(0.5, 0.0, 0.0, FLAT) == 0.0
    with pytest.raises(SingularTension):
        normal_form_rhs(0.5, 0.1, 0.0, p, gamma_fn=lambda r: 0.0)
    with pytest.raises(DomainError):
        normal_form_rhs(0.5, 0.1, 0.0, derive_problem(PRESETS["large"], 100.0))


def test_integrate_flat_problem():
    traj, res = meniscus.integrate_profile(0.3, FLAT)
    assert res == pytest.approx(0.3, abs=1e-12)


def test_small_deflection_oracle():
    p = derive_problem(PRESETS["small"], 0.0)
    guess = p.k1 * p.k2 / 4
    _, res = meniscus.integrate_profile(guess, p)
    assert abs(res) < 1e-6


def test_divergence_reports_sign():
    p = derive_problem(PRESETS["small"], 800.0)
    with pytest.raises(Diverged) as info:
        meniscus.integrate_profile(1e-4, p)
    # strong tip field at a tiny tip height pulls the profile down past the pipet plane
    assert info.value.residual == -meniscus.Z_ESCAPE


@pytest.mark.parametrize("U, expected, tol", [(0.0, 0.1834, 0.02), (3000.0, 0.4848, 0.10)])
def test_shoot_large(U, expected, tol):
    prof, rep = meniscus.shoot(derive_problem(PRESETS["large"], U))
    assert prof.z_m == pytest.approx(expected, rel=tol)
    assert rep.converged and prof.residual <= 1e-4
    prof.check_invariants()


def test_shoot_small_uncharged():
    p = derive_problem(PRESETS["small"], 0.0)
    prof, _ = meniscus.shoot(p)
    assert prof.z_m == pytest.approx(p.k1 * p.k2 / 4, rel=1e-2)
    # linearized solution is the exact parabola
    assert np.max(np.abs(prof.z - prof.z_m * (1 - prof.r**2))) < 1e-8


def test_no_solution_far_above_limit():
    with pytest.raises(NoSolution):
        meniscus.shoot(derive_problem(PRESETS["small"], 1500.0))


def test_reverse_shooting_agrees():
    p = derive_problem(PRESETS["large"], 0.0)
    fwd, _ = meniscus.shoot(p)
    rev = meniscus.shoot_reverse(p)
    assert abs(rev.z_m - fwd.z_m) < 1e-4


def test_reverse_flat():
    rev = meniscus.shoot_reverse(FLAT)
    assert abs(rev.z_m) < 1e-8


def test_back_integration():
    p = derive_problem(PRESETS["small"], 400.0)
    prof, _ = meniscus.shoot(p)
    assert meniscus.back_integration_check(prof, p) < 1e-6


def test_charge_density():
    p = derive_problem(PRESETS["large"], 5500.0)
    prof, _ = meniscus.shoot(p)
    tip = math.sqrt(p.k3) / (prof.z_m * math.log(p.d_hat / prof.z_m))
    assert prof.sigma_hat[0] == pytest.approx(tip, rel=1e-12)
    assert prof.sigma_hat[0] == pytest.approx(1.629, rel=0.01)
    assert np.argmax(prof.sigma_hat) == 0
    zero, _ = meniscus.shoot(derive_problem(PRESETS["large"], 0.0))
    assert np.all(zero.sigma_hat == 0)


def test_fatter_than_parabola_near_limit():
    prof, _ = meniscus.shoot(derive_problem(PRESETS["small"], 800.0))
    assert np.all(prof.z >= prof.z_m * (1 - prof.r**2) - 1e-9)


def test_frozen_tension_deviation_largest_at_tip():
    r = np.linspace(0, 1, 51)
    for kind in (TensionLaw.EXPONENTIAL, TensionLaw.TANH_INCREASING, TensionLaw.TANH_DECREASING):
        t = meniscus.frozen_tension(kind, 0.7, 0.2)
        dev = np.abs(1 - np.array([t(x) for x in r]))
        assert np.argmax(dev) == 0


def test_tolman_examples():
    prof, rep = meniscus.solve(derive_problem(PRESETS["small"], 600.0, "exponential"))
    assert prof.z_m == pytest.approx(0.7286, rel=0.10)
    assert rep.converged and rep.delta_zm_last < 0.005
    assert 1 <= rep.tolman_iterations <= 5


def test_tolman_uncharged_equals_constant():
    base, _ = meniscus.shoot(derive_problem(PRESETS["small"], 0.0))
    for kind in (TensionLaw.EXPONENTIAL, TensionLaw.TANH_INCREASING, TensionLaw.TANH_DECREASING):
        prof, _ = meniscus.solve(derive_problem(PRESETS["small"], 0.0, kind))
        assert prof.z_m == pytest.approx(base.z_m, rel=1e-3)


def test_sweep_and_quadratic_check():
    assert meniscus.sweep(PRESETS["large"], []).cells == {}
    res = meniscus.sweep(PRESETS["small"], [0, 400, 1500], [TensionLaw.CONSTANT])
    assert res.cells[(1500, TensionLaw.CONSTANT)] is None
    assert (1500, TensionLaw.CONSTANT) in res.errors
    assert len(res.column("constant")) == 2
    pts = [(u, 0.1 + 2e-6 * u * u) for u in (0, 100, 200, 300)]
    assert meniscus.quadratic_check(pts)[2] < 1e-12
    with pytest.raises(ValueError):
        meniscus.quadratic_check(pts[:3])


def test_sweep_flags_heights_above_radius():
    res = meniscus.sweep(PRESETS["small"], [860.0], [TensionLaw.CONSTANT])
    assert res.cells[(860.0, TensionLaw.CONSTANT)] > 1
    assert (860.0, TensionLaw.CONSTANT) in res.beyond


def test_limit_potential_small_constant():
    lim = meniscus.limit_potential(PRESETS["small"], U_lo=700.0, U_hi=900.0)
    assert lim.U_lim == pytest.approx(840, rel=0.10)
    assert lim.z_m <= 1.0 and lim.bracket[1] - lim.bracket[0] <= 1.0
    with pytest.raises(BadBracket):
        meniscus.limit_potential(PRESETS["small"], U_lo=0.0, U_hi=500.0)
