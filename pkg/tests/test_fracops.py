import math

import numpy as np
import pytest

from spherefrac.errors import DomainError, MeanNotZeroError
from spherefrac.fracops import (
    FracOrder,
    apply_frac_at_pole,
    apply_L2s_at_pole,
    apply_neg_at_pole,
    apply_Ss_at_pole,
    decompose,
    dtn_spectral,
    exponent_fit,
    kernel_Kneg_heat,
    kernel_Kneg_zeta,
    kernel_Ks,
    kernel_L2s,
    kernel_Ss,
    minak_identity_rhs,
    profile_Kneg,
    spectral_frac,
)
from spherefrac.specfun import gamma
from spherefrac.zonal import SphereDim, ZonalCoeffs, eigenvalues, funk_hecke_multiplier, zonal_at_pole

D3, D4, D5 = SphereDim(3), SphereDim(4), SphereDim(5)

# (1/4pi) sum_k lambda_k^(-1/2) (2k+1) P_k(0), mpmath nsum at 60 digits
KNEG_N3_S05_TAU0 = -0.047984119449350921062


def _spectral_pole(c, mult):
    return float(np.sum(c.a * mult * zonal_at_pole(c.dim, c.K)))


class TestSpectral:
    def test_constant_killed(self):
        c = ZonalCoeffs.constant(D3, 2.0)
        assert np.all(spectral_frac(c, FracOrder(0.5)).a == 0.0)

    def test_one_hot(self):
        # lambda_2 = 2 (2 + n - 2): 6 on S^2, 8 on S^3
        assert spectral_frac(ZonalCoeffs.one_hot(D3, 2), FracOrder(0.5)).a[2] == pytest.approx(math.sqrt(6), rel=1e-15)
        assert spectral_frac(ZonalCoeffs.one_hot(D4, 2), FracOrder(0.5)).a[2] == pytest.approx(math.sqrt(8), rel=1e-15)

    def test_compose_identity(self, rng):
        a = rng.standard_normal(10)
        a[0] = 0.0
        c = ZonalCoeffs(D4, a)
        back = spectral_frac(spectral_frac(c, FracOrder(0.37)), FracOrder(0.37, "negative"))
        np.testing.assert_allclose(back.a, c.a, rtol=1e-14, atol=1e-15)

    def test_negative_mode_needs_mean_zero(self):
        with pytest.raises(MeanNotZeroError):
            spectral_frac(ZonalCoeffs(D3, [1.0, 1.0]), FracOrder(0.5, "negative"))

    def test_bare_float(self):
        c = ZonalCoeffs.one_hot(D3, 1)
        assert spectral_frac(c, -0.5).a[1] == pytest.approx(2 ** -0.5)

    @pytest.mark.parametrize("s, mode", [(1.0, "positive"), (0.0, "negative"), (0.5, "dtn"), (0.2, "other")])
    def test_order_validation(self, s, mode):
        with pytest.raises(DomainError):
            FracOrder(s, mode)

    def test_dtn(self):
        assert dtn_spectral(ZonalCoeffs.one_hot(D4, 1), 1.0).a[1] == pytest.approx(2.0)
        # the k = 0 symbol is nu^(2s), nonzero on constants
        assert dtn_spectral(ZonalCoeffs.constant(D3), 0.6).a[0] == pytest.approx(0.5 ** 0.6 * D3.omega)

    def test_dtn_reduction(self, rng):
        # (L+nu)^(2s) u = (L+nu)^(2s-1) (L+nu) u for 2s in [1, 2)
        c = ZonalCoeffs(D5, rng.standard_normal(8))
        lhs = dtn_spectral(c, 1.4).a
        rhs = dtn_spectral(dtn_spectral(c, 1.0), 0.4).a
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


class TestBesselIdentity:
    def test_zero_mode(self):
        assert abs(minak_identity_rhs(0, 0.5, 0.5)) < 1e-9

    def test_first_mode(self):
        assert minak_identity_rhs(1, 0.5, 0.5) == pytest.approx(math.sqrt(2), abs=1e-9)

    def test_higher_mode(self):
        assert minak_identity_rhs(7, 1.5, 0.25) == pytest.approx(70 ** 0.25, abs=1e-9)

    def test_flat_case(self):
        # nu = 0 (circle) has no correction
        assert minak_identity_rhs(3, 0.0, 0.4) == pytest.approx(3 ** 0.8, rel=1e-15)

    def test_range(self):
        with pytest.raises(DomainError):
            minak_identity_rhs(1, 0.5, 1.0)
        with pytest.raises(DomainError):
            minak_identity_rhs(0, 0.0, 0.5)


class TestKernels:
    def test_gamma_sign(self):
        assert gamma(-0.5) < 0
        assert all(gamma(-s) < 0 for s in (0.1, 0.5, 0.9))

    def test_kneg_zeta_dirichlet_series(self):
        assert kernel_Kneg_zeta(D3, 0.5, 0.0) == pytest.approx(KNEG_N3_S05_TAU0, abs=1e-6)

    def test_kneg_routes_agree(self):
        tau = np.array([-0.5, 0.0, 0.9])
        np.testing.assert_allclose(kernel_Kneg_zeta(D3, 0.7, tau), kernel_Kneg_heat(D3, 0.7, tau), atol=1e-7)

    def test_kneg_large_s_flat(self):
        vals = kernel_Kneg_zeta(D3, 1.2, np.array([0.0, 0.999]))
        assert abs(vals[1] - vals[0]) < 1.0

    def test_kneg_heat_multipliers(self):
        prof = profile_Kneg(D3, 0.6, "heat")
        lam = eigenvalues(D3, 8)
        for k in (1, 2, 5, 8):
            assert funk_hecke_multiplier(prof, k) == pytest.approx(lam[k] ** -0.6, abs=1e-5)

    @pytest.mark.parametrize("s", [0.25, 0.75])
    def test_ks_positive(self, s):
        tau = np.linspace(-1, 0.999, 25)
        assert np.all(kernel_Ks(D3, s, tau) > 0)

    def test_l2s_positive(self):
        assert np.all(kernel_L2s(D4, 0.25, np.linspace(-1, 0.999, 25)) > 0)

    def test_ss_single_signed(self):
        vals = kernel_Ss(D4, 0.5, np.linspace(-1, 0.999, 25))
        assert np.all(vals < 0) or np.all(vals > 0)

    def test_tau_range(self):
        with pytest.raises(DomainError):
            kernel_Ks(D3, 0.5, 1.0)


class TestApplication:
    def test_frac_constant(self):
        assert abs(apply_frac_at_pole(ZonalCoeffs.constant(D3), 0.5)) < 1e-10

    def test_frac_one_hot(self):
        val = apply_frac_at_pole(ZonalCoeffs.one_hot(D3, 1), 0.5)
        assert val == pytest.approx(math.sqrt(2) * 3 / (4 * math.pi), rel=1e-5)

    def test_frac_random(self, rng):
        c = ZonalCoeffs(D4, rng.standard_normal(9))
        oracle = _spectral_pole(c, eigenvalues(D4, 8) ** 0.75)
        assert apply_frac_at_pole(c, 0.75) == pytest.approx(oracle, rel=1e-5)

    def test_neg_one_hot(self):
        val = apply_neg_at_pole(ZonalCoeffs.one_hot(D3, 2), 0.5)
        assert val == pytest.approx(6 ** -0.5 * 5 / (4 * math.pi), rel=1e-5)

    def test_neg_inverse(self, rng):
        a = rng.standard_normal(7)
        a[0] = 0.0
        c = ZonalCoeffs(D4, a)
        val = apply_neg_at_pole(spectral_frac(c, FracOrder(0.4)), 0.4)
        assert val == pytest.approx(c.pole_value(), rel=1e-5)

    def test_neg_rejections(self):
        with pytest.raises(MeanNotZeroError):
            apply_neg_at_pole(ZonalCoeffs(D3, [1.0, 1.0]), 0.5)
        with pytest.raises(DomainError):
            apply_neg_at_pole(ZonalCoeffs.one_hot(D3, 1), 1.0)

    def test_l2s_constant(self):
        c = ZonalCoeffs.constant(D3, 1.5)
        assert apply_L2s_at_pole(c, 0.6) == pytest.approx(0.5 ** 0.6 * 1.5, rel=1e-8)

    def test_l2s_one_hot(self):
        val = apply_L2s_at_pole(ZonalCoeffs.one_hot(D3, 1), 0.6)
        assert val == pytest.approx(1.5 ** 0.6 * 3 / (4 * math.pi), rel=1e-5)

    def test_l2s_random(self, rng):
        c = ZonalCoeffs(D5, rng.standard_normal(7))
        oracle = _spectral_pole(c, (np.arange(7) + 1.5) ** 0.3)
        assert apply_L2s_at_pole(c, 0.3) == pytest.approx(oracle, rel=1e-5)

    def test_batch_matches_single(self, rng):
        items = [ZonalCoeffs(D3, rng.standard_normal(5)) for _ in range(2)]
        batch = apply_frac_at_pole(items, 0.3)
        single = [apply_frac_at_pole(c, 0.3) for c in items]
        np.testing.assert_allclose(batch, single, rtol=1e-9)


class TestDecomposition:
    def test_constant(self):
        c = ZonalCoeffs.constant(D3, 2.0)
        r = decompose(c, 0.25)
        assert r.lhs == 0.0
        assert r.dtn_part == pytest.approx(0.5 ** 0.5 * 2.0, rel=1e-6)
        assert r.smoothing_part == pytest.approx(-(0.5 ** 0.5) * 2.0, rel=1e-6)
        assert r.residual <= 1e-6

    @pytest.mark.parametrize("n, k, s", [(3, 1, 0.25), (5, 4, 0.4)])
    def test_one_hot(self, n, k, s):
        assert decompose(ZonalCoeffs.one_hot(SphereDim(n), k), s).residual <= 1e-5

    def test_ss_matches_difference(self, rng):
        c = ZonalCoeffs(D4, rng.standard_normal(6))
        s = 0.3
        k = np.arange(6)
        oracle = _spectral_pole(c, eigenvalues(D4, 5) ** s - (k + 1.0) ** (2 * s))
        assert apply_Ss_at_pole(c, s) == pytest.approx(oracle, abs=1e-5 * max(1.0, abs(oracle)))

    def test_range(self):
        with pytest.raises(DomainError):
            decompose(ZonalCoeffs.one_hot(D3, 1), 0.5)


class TestExponentFit:
    def test_synthetic(self):
        fit = exponent_fit(lambda d: 2.5 * d ** -3.0, 1e-3, 1e-1)
        assert fit.slope == pytest.approx(-3.0, abs=1e-6)

    def test_ks(self):
        fit = exponent_fit(lambda d: kernel_Ks(D3, 0.5, np.cos(d)), 1e-2, 1e-1)
        assert fit.slope == pytest.approx(-3.0, abs=0.05)

    def test_kneg(self):
        fit = exponent_fit(lambda d: kernel_Kneg_zeta(D3, 0.5, np.cos(d)), 10 ** -2.5, 1e-1)
        assert fit.slope == pytest.approx(-1.0, abs=0.05)
