import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spherefrac.errors import DomainError, PoleError
from spherefrac.specfun import (
    BESSEL_CROSSOVER,
    bessel_b,
    bessel_i,
    bessel_k2,
    gamma,
    gegenbauer_all,
    gegenbauer_at_one,
    hurwitz_zeta,
    lgamma_sign,
    rgamma,
    surface_area,
)
from spherefrac.specfun import _bessel_i_asym_scaled, _bessel_series

# 60-digit mpmath values
K03_AT_1 = 0.43507602420880202435
K075_AT_10 = 1.8263751436705312794e-05
I1_AT_03 = 0.15169384000359278033
I_NEG09_AT_2 = 1.7163042919472627709
I07_AT_30 = 775205402418.45179354
ZETA_03_01 = 0.97537770229799384126
ZETA_17_05 = 4.6201151053587905857
ZETA_15_09 = 2.8373148639044107088
B_NEG08_AT_07 = 0.32506793001476050075


class TestGamma:
    def test_values(self):
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
        assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-14)

    @pytest.mark.parametrize("x", [0.0, -1.0, -3.0])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            gamma(x)
        assert rgamma(x) == 0.0

    def test_negative_half_integer_sign(self):
        # Gamma(-1/2) < 0 is what makes the flat negative-power constant positive
        assert gamma(-0.5) < 0
        lg, sign = lgamma_sign(-0.5)
        assert sign == -1.0

    @given(st.floats(0.01, 0.99))
    def test_reflection(self, x):
        lhs = gamma(x) * gamma(1 - x)
        assert lhs == pytest.approx(math.pi / math.sin(math.pi * x), rel=1e-12)

    @given(st.floats(0.05, 14.0))
    def test_duplication(self, x):
        lhs = gamma(x) * gamma(x + 0.5)
        rhs = 2 ** (1 - 2 * x) * math.sqrt(math.pi) * gamma(2 * x)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestGegenbauer:
    def test_legendre_value(self):
        assert gegenbauer_all(2, 0.5, 0.5)[2] == pytest.approx(-0.125, abs=1e-15)

    def test_value_at_one(self):
        assert gegenbauer_at_one(3, 0.5) == pytest.approx(1.0)
        assert gegenbauer_all(3, 0.5, 1.0)[3] == pytest.approx(1.0, abs=1e-15)
        for k in range(10):
            assert gegenbauer_at_one(k, 1.5) == pytest.approx(math.comb(k + 2, k), rel=1e-14)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 1.5])
    def test_bounded_by_value_at_one(self, nu):
        tau = np.linspace(-1, 1, 401)
        C = gegenbauer_all(60, nu, tau)
        for k in range(61):
            assert np.max(np.abs(C[k])) <= gegenbauer_at_one(k, nu) * (1 + 1e-12)

    @given(st.floats(-1.0, 1.0), st.floats(0.0, 0.6))
    @settings(max_examples=40)
    def test_generating_function(self, tau, r):
        nu = 1.0
        C = gegenbauer_all(200, nu, tau)
        series = np.sum(C * r ** np.arange(201))
        assert series == pytest.approx((1 - 2 * r * tau + r * r) ** (-nu), rel=1e-12)


class TestBessel:
    def test_i_examples(self):
        assert bessel_i(0.0, 1.0) == pytest.approx(1.2660658777520084, rel=1e-14)
        assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-13)
        assert bessel_i(0.5, 1.0) == pytest.approx(0.9376748882, rel=1e-9)
        assert bessel_i(-0.9, 2.0) == pytest.approx(I_NEG09_AT_2, rel=1e-13)
        assert bessel_i(0.7, 30.0) == pytest.approx(I07_AT_30, rel=1e-12)

    @pytest.mark.parametrize("rho", [-0.8, 0.3, 1.5])
    def test_branches_agree_near_crossover(self, rho):
        z = np.linspace(20.0, 30.0, 11)
        series = _bessel_series(rho, z, 0) * np.exp(-z)
        asym = _bessel_i_asym_scaled(rho, z)
        np.testing.assert_allclose(series, asym, rtol=1e-10)
        assert BESSEL_CROSSOVER > 20.0

    def test_b_examples(self):
        assert bessel_b(-0.8, 0.0) == 0.0
        assert bessel_b(-1.0, 0.3) == pytest.approx(I1_AT_03, rel=1e-12)
        assert bessel_b(-0.8, 0.7) == pytest.approx(B_NEG08_AT_07, rel=1e-12)

    @pytest.mark.parametrize("z", [0.5, 2.0, 10.0])
    def test_b_consistency(self, z):
        rho = -0.9
        lead = (z / 2) ** rho * rgamma(rho + 1)
        assert bessel_b(rho, z) + lead == pytest.approx(bessel_i(rho, z), rel=1e-12)

    def test_k2_examples(self):
        assert bessel_k2(0.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2), rel=1e-12)
        assert bessel_k2(0.5, 2.0) == pytest.approx(0.1199377, rel=1e-6)
        assert bessel_k2(0.3, 1.0) == pytest.approx(K03_AT_1, rel=1e-12)
        assert bessel_k2(0.75, 10.0) == pytest.approx(K075_AT_10, rel=1e-11)
        large = bessel_k2(0.3, 50.0) * math.exp(50.0) * math.sqrt(100.0 / math.pi)
        assert abs(large - 1) < 1e-2

    @pytest.mark.parametrize("s", [0.0, 1.0, 1.5])
    def test_k2_order_range(self, s):
        with pytest.raises(DomainError):
            bessel_k2(s, 1.0)


class TestHurwitz:
    def test_values(self):
        assert hurwitz_zeta(2.0, 1.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-13)
        assert hurwitz_zeta(0.3, 0.1) == pytest.approx(ZETA_03_01, rel=1e-12)
        assert hurwitz_zeta(1.7, 0.5) == pytest.approx(ZETA_17_05, rel=1e-12)
        assert hurwitz_zeta(1.5, 0.9) == pytest.approx(ZETA_15_09, rel=1e-12)

    @pytest.mark.parametrize("sigma", [0.3, 1.7, -0.9, 2.5])
    def test_recurrence(self, sigma):
        x = np.array([0.05, 0.3, 0.77])
        lhs = hurwitz_zeta(sigma, x) - hurwitz_zeta(sigma, x + 1)
        np.testing.assert_allclose(lhs, x ** -sigma, rtol=1e-12)

    # the sigma range used by the circle closed forms
    @given(st.floats(-1.0, 4.0).filter(lambda s: abs(s - 1) > 1e-3), st.floats(0.01, 2.0))
    @settings(max_examples=60)
    def test_recurrence_property(self, sigma, x):
        lhs = hurwitz_zeta(sigma, x) - hurwitz_zeta(sigma, x + 1)
        assert lhs == pytest.approx(x ** -sigma, rel=1e-10, abs=1e-12)

    def test_pole(self):
        with pytest.raises(PoleError):
            hurwitz_zeta(1.0, 0.5)


def test_surface_area():
    assert surface_area(2) == pytest.approx(2 * math.pi)
    assert surface_area(3) == pytest.approx(4 * math.pi)
    assert surface_area(4) == pytest.approx(2 * math.pi ** 2)
