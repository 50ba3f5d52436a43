import math

import numpy as np
import pytest

from kpwaves.errors import DegenerateEquationError, InvalidMaterialError
from kpwaves.materials import (EquationSpec, MaterialCompressible,
                               MaterialIncompressible, beta3_from_gamma,
                               beta3_landau, beta_quadratic, equation_spec,
                               spec_from_incompressible,
                               speed_identity_residual, wave_speeds)


def compressible(lam=2.0, mu=1.0, rho0=1.0, alpha1=None, alpha2=0.0,
                 gamma1=0.0, gamma2=0.0, nu0=1.0):
    # alpha1 defaults to the value closing the speed identity
    if alpha1 is None:
        alpha1 = lam + 2 * mu - mu - gamma1
    return MaterialCompressible(lam=lam, mu=mu, rho0=rho0, alpha1=alpha1,
                                alpha2=alpha2, gamma0=mu, gamma1=gamma1,
                                gamma2=gamma2, nu0=nu0)


class TestWaveSpeeds:
    def test_perfect_squares(self):
        assert wave_speeds(compressible(lam=2, mu=1, rho0=1)) == (2.0, 1.0)

    def test_zero_lambda(self):
        c_l, c_t = wave_speeds(compressible(lam=0, mu=1, rho0=1))
        assert c_l == pytest.approx(math.sqrt(2), rel=1e-15)
        assert c_t == 1.0

    def test_heavy_density(self):
        assert wave_speeds(compressible(lam=2, mu=1, rho0=4)) == (1.0, 0.5)

    def test_identity_residual_zero_when_consistent(self):
        m = compressible(lam=2, mu=1, gamma1=0.5)
        assert speed_identity_residual(m) == 0.0

    def test_identity_residual_warns_when_inconsistent(self):
        m = compressible(alpha1=0.0)
        assert speed_identity_residual(m) == pytest.approx(0.5)
        with pytest.warns(UserWarning, match="residual"):
            wave_speeds(m)

    def test_ordering_cl_above_ct(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            mu = float(rng.uniform(0.1, 10))
            lam = float(rng.uniform(-mu + 1e-3, 10))  # lam + mu > 0
            c_l, c_t = wave_speeds(compressible(lam=lam, mu=mu,
                                                rho0=float(rng.uniform(0.1, 10))))
            assert c_l > c_t


class TestMaterialValidation:
    def test_rejects_nonpositive_mu(self):
        with pytest.raises(InvalidMaterialError):
            compressible(mu=0.0)

    def test_rejects_nonpositive_density(self):
        with pytest.raises(InvalidMaterialError):
            compressible(rho0=-1.0)

    def test_rejects_soft_lambda(self):
        with pytest.raises(InvalidMaterialError):
            compressible(lam=-3.0, mu=1.0)

    def test_rejects_gamma0_mu_mismatch(self):
        with pytest.raises(InvalidMaterialError, match="gamma0"):
            MaterialCompressible(lam=2, mu=1, rho0=1, alpha1=2, alpha2=0,
                                 gamma0=1.1, gamma1=0, gamma2=0, nu0=1.0)

    def test_gamma0_mu_tolerates_rounding(self):
        mu = 1.0 / 3.0
        m = MaterialCompressible(lam=2, mu=mu, rho0=1, alpha1=2, alpha2=0,
                                 gamma0=mu * (1 + 1e-13), gamma1=0, gamma2=0,
                                 nu0=1.0)
        assert m.mu == mu

    def test_physical_nu_conversion(self):
        m = MaterialCompressible.with_physical_nu(
            lam=2, mu=1, rho0=2.0, alpha1=2, alpha2=0, gamma0=1, gamma1=0,
            gamma2=0, nu=0.04, L=2.0, epsilon=0.01)
        # nu0 = nu / (eps rho0 L^2) = 0.04 / (0.01 * 2 * 4)
        assert m.nu0 == pytest.approx(0.5)

    def test_physical_nu_conversion_incompressible(self):
        m = MaterialIncompressible.with_physical_nu(
            mu=1, rho0=2.0, A=0, D=0, nu=0.04, L=2.0, epsilon=0.1)
        # nu0 = nu / (eps^2 rho0 L^2) = 0.04 / (0.01 * 2 * 4)
        assert m.nu0 == pytest.approx(0.5)


class TestBetaQuadratic:
    def test_zero_numerator(self):
        assert beta_quadratic(compressible(alpha2=0, gamma1=0, gamma2=0)) == 0.0

    def test_hand_value(self):
        m = compressible(lam=2, mu=1, rho0=1, alpha2=2, gamma1=1, gamma2=0)
        assert beta_quadratic(m) == pytest.approx(0.25, rel=1e-15)

    def test_speed_ratio_factor(self):
        # alpha2 + gamma2 + gamma1 = 3 gamma0 makes the second factor 1
        m = compressible(lam=2, mu=1, rho0=1, alpha2=3.0, gamma1=0, gamma2=0)
        assert beta_quadratic(m) == pytest.approx(0.25, rel=1e-15)


class TestBeta3:
    def test_unit_bracket(self):
        assert beta3_landau(1.0, 0.0, 0.0) == 1.5

    def test_cancelling_landau_constants(self):
        assert beta3_landau(1.0, -2.0, 1.0) == 1.5

    def test_hand_value(self):
        assert beta3_landau(2.0, 2.0, 1.0) == 3.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            mu = float(rng.uniform(0.1, 10))
            A = float(rng.uniform(-10, 10))
            D = float(rng.uniform(-10, 10))
            s = float(rng.uniform(0.1, 100))
            assert beta3_landau(s * mu, s * A, s * D) == pytest.approx(
                beta3_landau(mu, A, D), rel=1e-12)

    def test_gamma_form(self):
        assert beta3_from_gamma(2.0, 4.0) == 3.0

    def test_material_route(self):
        m = MaterialIncompressible(mu=1.0, rho0=1.0, A=0.0, D=0.0, nu0=1.0)
        spec = spec_from_incompressible(m)
        assert spec.nonlin_coeff == 1.5
        assert spec.sign_branch == "plus"


class TestEquationSpec:
    def test_quadratic_positive_beta_is_minus(self):
        assert equation_spec("quadratic", 0.5, 1.0).sign_branch == "minus"

    def test_cubic_positive_beta3_is_plus(self):
        assert equation_spec("cubic", 1.5, 1.0).sign_branch == "plus"

    def test_quadratic_negative_beta_is_plus(self):
        assert equation_spec("quadratic", -1.0, 1.0).sign_branch == "plus"

    def test_sign_rule_on_random_coefficients(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            coeff = float(rng.choice([-1, 1]) * 10.0 ** rng.uniform(-3, 3))
            sq = equation_spec("quadratic", coeff, 1.0)
            sc = equation_spec("cubic", coeff, 1.0)
            assert sq.sign_branch == ("minus" if coeff > 0 else "plus")
            assert sc.sign_branch == ("plus" if coeff > 0 else "minus")

    def test_zero_coefficient_degenerate(self):
        with pytest.raises(DegenerateEquationError):
            equation_spec("quadratic", 0.0, 1.0)

    def test_nonpositive_nu0_degenerate(self):
        with pytest.raises(DegenerateEquationError):
            equation_spec("cubic", 1.0, 0.0)

    def test_direct_construction_rejects_inconsistent_branch(self):
        with pytest.raises(ValueError):
            EquationSpec(kind="quadratic", sign_branch="plus",
                         nonlin_coeff=1.0, nu0=1.0)

    def test_for_branch_placeholder(self):
        spec = EquationSpec.for_branch("quadratic", "plus")
        assert spec.sign_branch == "plus" and spec.nonlin_coeff == -1.0
        spec = EquationSpec.for_branch("cubic", "plus")
        assert spec.sign_branch == "plus" and spec.nonlin_coeff == 1.0

    def test_equation_sign(self):
        assert EquationSpec.for_branch("cubic", "plus").equation_sign == 1
        assert EquationSpec.for_branch("cubic", "minus").equation_sign == -1
