import math

import numpy as np
import pytest

from spherefrac.circle import (
    CircleKernelQuery,
    circle_frac_cos,
    circle_kernel_neg,
    circle_kernel_pos,
    circle_kernel_pos_heat,
    endpoint_exponent,
    fine_f,
    fine_H,
    fine_H_zeta,
    theta_heat_kernel,
)
from spherefrac.errors import DomainError, PoleError
from spherefrac.specfun import hurwitz_zeta

# -2 (2 pi)^{-3/2} eta(3/2), mpmath altzeta at 40 digits
KNEG_15_AT_HALF = -0.097163933235466724248
# 2 Re Li_{3/2}(exp(2 pi i 0.3)) / (2 pi)^{3/2}, mpmath polylog
KNEG_15_AT_03 = -0.057787707895705495358


class TestNegativeKernel:
    def test_alternating_zeta_value(self):
        assert circle_kernel_neg(CircleKernelQuery(1.5, 0.5)) == pytest.approx(KNEG_15_AT_HALF, abs=1e-12)

    def test_polylog_value(self):
        assert circle_kernel_neg(CircleKernelQuery(1.5, 0.3)) == pytest.approx(KNEG_15_AT_03, abs=1e-12)

    @pytest.mark.parametrize("sigma", [0.3, 0.7, 1.5, 2.5])
    def test_symmetry(self, sigma):
        x = np.linspace(0.01, 0.49, 13)
        a = circle_kernel_neg(CircleKernelQuery(sigma, x))
        b = circle_kernel_neg(CircleKernelQuery(sigma, 1 - x))
        np.testing.assert_allclose(a, b, rtol=1e-12)

    @pytest.mark.parametrize("sigma", [1.0, 3.0])
    def test_pole(self, sigma):
        with pytest.raises(PoleError):
            circle_kernel_neg(CircleKernelQuery(sigma, 0.3))

    def test_query_validation(self):
        with pytest.raises(DomainError):
            CircleKernelQuery(0.0, 0.3)
        with pytest.raises(DomainError):
            CircleKernelQuery(0.5, 1.0)


class TestPositiveKernel:
    @pytest.mark.parametrize("sigma", [0.5, 1.5])
    def test_heat_oracle(self, sigma):
        q = CircleKernelQuery(sigma, np.array([0.1, 0.25, 0.5]))
        np.testing.assert_allclose(circle_kernel_pos(q), circle_kernel_pos_heat(q), rtol=1e-7)

    @pytest.mark.parametrize("sigma", [0.2, 0.5, 0.9])
    def test_formula_consistency(self, sigma):
        # the negative-power closed form with sigma -> -sigma is the positive one
        x = np.array([0.05, 0.3, 0.6])
        s = -sigma
        subst = (hurwitz_zeta(1 - s, x) + hurwitz_zeta(1 - s, 1 - x)) / (2 * math.gamma(s) * math.cos(math.pi * s / 2))
        np.testing.assert_allclose(circle_kernel_pos(CircleKernelQuery(sigma, x)), subst, rtol=1e-12)

    @pytest.mark.parametrize("sigma", [0.3, 0.8, 1.4])
    def test_sign_product(self, sigma):
        x = np.linspace(0.02, 0.98, 9)
        k = circle_kernel_pos(CircleKernelQuery(sigma, x))
        prod = math.gamma(-sigma) * math.cos(math.pi * sigma / 2) * k
        zsum = 0.5 * (hurwitz_zeta(1 + sigma, x) + hurwitz_zeta(1 + sigma, 1 - x))
        np.testing.assert_allclose(prod, zsum, rtol=1e-13)
        assert np.all(prod > 0)

    def test_range(self):
        with pytest.raises(PoleError):
            circle_kernel_pos(CircleKernelQuery(1.0, 0.3))
        with pytest.raises(DomainError):
            circle_kernel_pos(CircleKernelQuery(2.5, 0.3))

    @pytest.mark.parametrize("sigma", [0.5, 1.5])
    def test_spectral_route(self, sigma):
        for k in range(1, 6):
            assert circle_frac_cos(k, sigma) == pytest.approx((2 * math.pi * k) ** sigma, rel=1e-6)


class TestEndpoint:
    @pytest.mark.parametrize("sigma", [0.3, 0.5, 0.7, 1.5])
    def test_negative(self, sigma):
        assert endpoint_exponent(sigma, "neg") == pytest.approx(sigma - 1, abs=0.02)

    @pytest.mark.parametrize("sigma", [0.5, 1.5])
    def test_positive(self, sigma):
        assert endpoint_exponent(sigma, "pos") == pytest.approx(-(1 + sigma), abs=0.02)

    def test_kind(self):
        with pytest.raises(DomainError):
            endpoint_exponent(0.5, "other")


class TestTheta:
    def test_branches_agree(self):
        x = np.array([0.0, 0.1, 0.3, 0.5, 0.9])
        for t in (0.01, 0.1, 1 / (4 * math.pi ** 2)):
            a = theta_heat_kernel(x, t, "spectral")
            b = theta_heat_kernel(x, t, "dual")
            np.testing.assert_allclose(a, b, rtol=1e-12)

    @pytest.mark.parametrize("t", [1e-3, 0.02, 0.5])
    def test_mass(self, t):
        x = np.linspace(0, 1, 2001)[:-1]
        # periodic trapezoid rule is spectrally accurate
        assert np.mean(theta_heat_kernel(x, t)) == pytest.approx(1.0, abs=1e-12)

    def test_fine_f(self):
        x = np.array([0.2, 0.7])
        np.testing.assert_allclose(fine_f(x, 4 * math.pi * 0.03), theta_heat_kernel(x, 0.03), rtol=1e-15)

    def test_validation(self):
        with pytest.raises(DomainError):
            theta_heat_kernel(0.2, 0.0)
        with pytest.raises(DomainError):
            theta_heat_kernel(0.2, 0.1, "other")


class TestFine:
    @pytest.mark.parametrize("omega, x", [(-1.0, 0.5), (-0.5, 0.25), (-1.0, 0.25), (-0.5, 0.5)])
    def test_zeta_relation(self, omega, x):
        assert fine_H(x, omega) == pytest.approx(fine_H_zeta(x, omega), abs=1e-8)

    def test_symmetry(self):
        x = np.array([0.1, 0.35])
        np.testing.assert_allclose(fine_H(x, -0.7), fine_H(1 - x, -0.7), atol=1e-10)

    def test_validation(self):
        with pytest.raises(DomainError):
            fine_H(0.3, 0.5)
