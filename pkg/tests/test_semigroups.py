import math

import numpy as np
import pytest
from scipy.integrate import quad

from spherefrac.errors import DomainError
from spherefrac.quadrature import gauss_gegenbauer
from spherefrac.semigroups import (
    HEAT_T_MIN,
    HeatParam,
    PoissonParam,
    heat_apply,
    heat_kernel,
    poisson_apply,
    poisson_kernel,
    poisson_lipschitz_check,
)
from spherefrac.zonal import SphereDim, ZonalCoeffs, eigenvalues, synthesize, zonal_at_pole


def _sphere_integral(dim, vals, w):
    return dim.omega_sub * np.dot(w, vals)


class TestPoisson:
    def test_value(self):
        d = SphereDim(3)
        assert poisson_kernel(PoissonParam(0.5, d), 1.0) == pytest.approx(0.75 / (4 * math.pi * 0.125), rel=1e-14)
        assert poisson_kernel(PoissonParam(0.5, d), 1.0) == pytest.approx(0.4774648, abs=1e-7)

    def test_r_zero_constant(self):
        d = SphereDim(4)
        tau = np.linspace(-1, 1, 9)
        np.testing.assert_allclose(poisson_kernel(PoissonParam(0.0, d), tau), 1 / d.omega, rtol=1e-15)

    @pytest.mark.parametrize("n", [3, 5])
    @pytest.mark.parametrize("r", [0.3, 0.9])
    def test_normalization(self, n, r):
        d = SphereDim(n)
        p = PoissonParam(r, d)
        f = lambda tau: poisson_kernel(p, tau) * (1 - tau * tau) ** ((n - 3) / 2)
        total = d.omega_sub * quad(f, -1, 1, points=[r], epsabs=1e-14, epsrel=1e-14, limit=200)[0]
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_positive(self):
        d = SphereDim(3)
        tau = np.linspace(-1, 1, 201)
        for r in (0.1, 0.5, 0.99):
            assert np.all(poisson_kernel(PoissonParam(r, d), tau) > 0)

    def test_parameter_range(self):
        with pytest.raises(DomainError):
            PoissonParam(1.0, SphereDim(3))
        with pytest.raises(DomainError):
            poisson_kernel(PoissonParam(0.5, SphereDim(3)), 1.5)

    def test_apply_examples(self):
        d = SphereDim(3)
        c = ZonalCoeffs.one_hot(d, 3, 2.0)
        np.testing.assert_array_equal(poisson_apply(c, 0.0).a, c.a)
        assert poisson_apply(c, math.log(2)).a[3] == pytest.approx(2.0 / 8, rel=1e-15)

    @pytest.mark.parametrize("n", [3, 4])
    def test_apply_matches_kernel(self, n, rng):
        d = SphereDim(n)
        c = ZonalCoeffs(d, rng.standard_normal(9))
        t = 0.4
        x, w = gauss_gegenbauer(300, d.nu)
        kernel_route = _sphere_integral(d, poisson_kernel(PoissonParam(math.exp(-t), d), x) * synthesize(c, x), w)
        assert poisson_apply(c, t).pole_value() == pytest.approx(kernel_route, abs=1e-9)


class TestHeat:
    def test_large_time(self):
        d = SphereDim(3)
        t = 10.0
        w = heat_kernel(HeatParam(t, d), np.linspace(-1, 1, 5))
        assert np.max(np.abs(w - 1 / d.omega)) < math.exp(-t * (d.n - 1))

    @pytest.mark.parametrize("t", [0.05, 0.5])
    def test_normalization(self, t):
        d = SphereDim(3)
        x, w = gauss_gegenbauer(300, d.nu)
        assert _sphere_integral(d, heat_kernel(HeatParam(t, d), x), w) == pytest.approx(1.0, abs=1e-10)

    def test_positive(self):
        d = SphereDim(3)
        tau = np.linspace(-1, 1, 201)
        for t in (0.2, 1.0):
            assert np.all(heat_kernel(HeatParam(t, d), tau) > 0)
        # for small t the antipodal values are far below double-precision rounding
        for t in (1e-3, 0.05):
            w = heat_kernel(HeatParam(t, d), tau)
            assert np.all(w > -1e-13) and np.all(w[tau > 0.98] > 0)

    def test_t_min(self):
        d = SphereDim(3)
        with pytest.raises(DomainError):
            heat_kernel(HeatParam(HEAT_T_MIN / 2, d), 0.5)
        with pytest.raises(DomainError):
            HeatParam(0.0, d)

    def test_apply_example(self):
        d = SphereDim(3)
        c = ZonalCoeffs.one_hot(d, 1)
        assert heat_apply(c, 0.5).a[1] == pytest.approx(math.exp(-1), rel=1e-15)
        np.testing.assert_array_equal(heat_apply(c, 0.0).a, c.a)

    def test_semigroup_law(self, rng):
        c = ZonalCoeffs(SphereDim(4), rng.standard_normal(7))
        np.testing.assert_allclose(heat_apply(heat_apply(c, 0.2), 0.3).a, heat_apply(c, 0.5).a, rtol=1e-14)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_heat_is_not_poisson(self, n):
        # exp(-tL) and exp(-t sqrt(-Delta)) differ on the sphere
        d = SphereDim(n)
        k = np.arange(1, 6)
        lam = eigenvalues(d, 5)[1:]
        assert np.max(np.abs(np.exp(-k) - np.exp(-np.sqrt(lam)))) > 1e-3


class TestLipschitz:
    def test_constant(self):
        assert poisson_lipschitz_check(ZonalCoeffs.constant(SphereDim(3), 3.0)) == 0.0

    @pytest.mark.parametrize("k", [1, 4, 9])
    def test_one_hot(self, k):
        d = SphereDim(3)
        c = ZonalCoeffs.one_hot(d, k, 0.7)
        expected = k * abs(zonal_at_pole(d, k)[k] * 0.7)
        assert poisson_lipschitz_check(c) == pytest.approx(expected, rel=0.1)

    def test_triangle_bound(self, rng):
        d = SphereDim(4)
        c = ZonalCoeffs(d, rng.standard_normal(11))
        bound = np.sum(np.arange(11) * np.abs(c.a) * zonal_at_pole(d, 10))
        C = poisson_lipschitz_check(c)
        assert 0 < C <= bound * (1 + 1e-12)
