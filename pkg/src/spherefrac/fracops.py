"""Fractional powers of the Laplace-Beltrami operator on the sphere.

Spectral routes multiply zonal coefficients by ``lambda_k^(+-s)`` or
``(k + nu)^(2s)``.  Kernel routes build the rotation invariant kernels
``K_s``, ``K_{-s}``, ``L_{2s}`` and ``S_s`` from time integrals over the
Poisson or heat semigroup and apply them at the pole of a zonal function.
The two kinds of route are independent and serve as oracles for each
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, MeanNotZeroError
from .quadrature import IntegrandMeta, QuadratureSpec, integrate_time
from .semigroups import heat_series
from .specfun import (
    bessel_asymptotic_coeffs,
    bessel_b_scaled,
    bessel_i_scaled,
    gegenbauer_all,
    gegenbauer_gap_all,
)
from .zonal import (
    KernelProfile,
    NearModel,
    SphereDim,
    ZonalCoeffs,
    eigenvalues,
    pole_integral,
)

__all__ = [
    "FracOrder",
    "DecompositionReport",
    "SlopeFit",
    "KERNEL_SPEC",
    "APPLY_SPEC",
    "spectral_frac",
    "dtn_spectral",
    "minak_integral",
    "minak_identity_rhs",
    "kernel_Kneg_zeta",
    "kernel_Kneg_heat",
    "kernel_Ks",
    "kernel_L2s",
    "kernel_Ss",
    "profile_Kneg",
    "profile_Ks",
    "profile_L2s",
    "profile_Ss",
    "apply_frac_at_pole",
    "apply_neg_at_pole",
    "apply_L2s_at_pole",
    "apply_Ss_at_pole",
    "decompose",
    "exponent_fit",
    "flat_constant_pos",
    "flat_constant_neg",
    "ss_leading_constant",
]

# Kernel values are computed more tightly than the outer angular integral
# so that quadrature noise in the kernel never stalls the outer refinement.
KERNEL_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12, max_levels=11)
APPLY_SPEC = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-10, max_levels=10)

# Guard on the distance to the diagonal.
GAP_MIN = 1e-8

# Near-diagonal cutoffs: heat-route kernels need long series below 1e-2.
D_MIN_HEAT = 1e-2
D_MIN_POISSON = 1e-3


@dataclass(frozen=True)
class FracOrder:
    """Exponent of a fractional power.

    Parameters
    ----------
    s : float
    mode : {'positive', 'negative', 'dtn'}
        ``positive``: ``s`` in (0, 1).  ``negative``: ``s > 0``.
        ``dtn``: ``2s`` in (0, 1).
    """

    s: float
    mode: str = "positive"

    def __post_init__(self):
        s = self.s
        if self.mode == "positive":
            ok = 0.0 < s < 1.0
        elif self.mode == "negative":
            ok = s > 0.0
        elif self.mode == "dtn":
            ok = 0.0 < 2.0 * s < 1.0
        else:
            raise DomainError(f"unknown mode {self.mode!r}")
        if not ok:
            raise DomainError(f"s={s} is outside the range of mode {self.mode!r}")


@dataclass(frozen=True)
class DecompositionReport:
    """Three-route evaluation of ``(-Delta)^s u = (L + nu)^(2s) u + S^s u`` at the pole."""

    lhs: float
    dtn_part: float
    smoothing_part: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.dtn_part - self.smoothing_part)


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares log-log slope with a 95% confidence half-width."""

    slope: float
    half_width: float
    intercept: float


# ----------------------------------------------------------------------
# spectral routes


def _check_mean_zero(c: ZonalCoeffs):
    if abs(c.a[0]) > 0.0:
        raise MeanNotZeroError("negative powers need mean-zero input (a_0 = 0)")


def spectral_frac(c: ZonalCoeffs, f: Union[FracOrder, float]) -> ZonalCoeffs:
    """Apply ``(-Delta)^(+-s)`` by coefficient multiplication.

    Parameters
    ----------
    c : ZonalCoeffs
    f : FracOrder or float
        A bare float means positive mode; a negative float means negative
        mode with exponent ``-f``.

    Raises
    ------
    MeanNotZeroError
        In negative mode when ``a_0 != 0``.
    """
    if not isinstance(f, FracOrder):
        f = FracOrder(float(f), "positive") if f > 0 else FracOrder(-float(f), "negative")
    lam = eigenvalues(c.dim, c.K)
    if f.mode == "negative":
        _check_mean_zero(c)
        mult = np.zeros_like(lam)
        mult[1:] = lam[1:] ** (-f.s)
    else:
        mult = lam ** f.s
    return c.scaled(mult)


def dtn_spectral(c: ZonalCoeffs, two_s: float) -> ZonalCoeffs:
    """Apply ``(L + nu)^(2s)``: ``a_k -> (k + nu)^(2s) a_k``, ``2s`` in (0, 2)."""
    if not (0.0 < two_s < 2.0):
        raise DomainError("two_s must lie in (0, 2)")
    k = np.arange(c.K + 1)
    return c.scaled((k + c.dim.nu) ** two_s)


# ----------------------------------------------------------------------
# Bessel identity for the symbol


def _minak_tail(nu: float, s: float):
    # Large-t expansion of exp(-nu t) B_rho(nu t) t^(-1/2-s) with rho = -s-1/2,
    # integrated term by term from T to infinity.
    a = bessel_asymptotic_coeffs(-s - 0.5, 40)
    pref = 1.0 / math.sqrt(2.0 * math.pi * nu)

    def tail(T):
        total = 0.0
        for j, aj in enumerate(a):
            term = (-1) ** j * aj * nu ** (-j) * T ** (-s - j) / (s + j)
            total += term
            if abs(term) < 1e-18 * abs(total):
                break
        return pref * total

    return tail


def minak_integral(k: int, nu: float, s: float, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    """``J = int_0^inf exp(-t(k+nu)) B_{-s-1/2}(nu t) t^(-1/2-s) dt``."""
    if nu == 0.0:
        return 0.0
    rho = -s - 0.5

    def f(t):
        return np.exp(-k * t) * bessel_b_scaled(rho, nu * t) * t ** (-0.5 - s)

    if k == 0:
        T = 40.0 / nu
        meta = IntegrandMeta(1.0 - 2.0 * s, 1.0, tail=_minak_tail(nu, s), tail_start=T)
    else:
        meta = IntegrandMeta(1.0 - 2.0 * s, float(k))
    return integrate_time(f, meta, spec).value


def _minak_constant(nu: float, s: float) -> float:
    return (2.0 * nu) ** (s + 0.5) * math.sqrt(math.pi) / math.gamma(-s)


def minak_identity_rhs(k: int, nu: float, s: float, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    """Right-hand side of the Bessel identity for ``(k (k + 2 nu))^s``.

    Returns ``(k+nu)^(2s) + (2nu)^(s+1/2) sqrt(pi)/Gamma(-s) * J`` with ``J``
    from :func:`minak_integral`; this equals ``(k(k+2nu))^s``.
    """
    if k < 0 or nu < 0 or k + nu <= 0:
        raise DomainError("need k >= 0, nu >= 0 and k + nu > 0")
    if not (0.0 < s < 1.0):
        raise DomainError("s must lie in (0, 1)")
    return (k + nu) ** (2.0 * s) + _minak_constant(nu, s) * minak_integral(k, nu, s, spec)


# ----------------------------------------------------------------------
# kernels


def flat_constant_pos(m: int, s: float) -> float:
    """Leading coefficient of a kernel of order ``2s`` on an ``m``-manifold."""
    return 4.0 ** s * math.gamma(0.5 * m + s) / (math.pi ** (0.5 * m) * abs(math.gamma(-s)))


def flat_constant_neg(m: int, s: float) -> float:
    """Leading coefficient of the Riesz potential of order ``2s`` on an ``m``-manifold."""
    return math.gamma(0.5 * m - s) / (4.0 ** s * math.pi ** (0.5 * m) * math.gamma(s))


def _gaps(dim, tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau > 1.0) or np.any(tau < -1.0):
        raise DomainError("tau must lie in [-1, 1)")
    gap = 1.0 - tau
    if np.any(gap < GAP_MIN):
        raise DomainError("1 - tau below 1e-8 cannot be resolved")
    return tau, gap


def _time_integral(f, meta, spec, gap):
    g = np.atleast_1d(gap)
    r = integrate_time(lambda t: f(t, g), meta, spec, check=False)
    return np.atleast_1d(r.value)


def _poisson_t(dim, t, gap):
    # P_{exp(-t)}(1 - gap) on a (t, gap) grid with full precision in 1 - r.
    om = -np.expm1(-t)[:, None]
    r = np.exp(-t)[:, None]
    den = om * om + 2.0 * r * gap[None, :]
    return om * (1.0 + r) / (dim.omega * den ** (0.5 * dim.n))


def _poisson_t_minus_mean(dim, t, gap):
    return _poisson_t(dim, t, gap) - 1.0 / dim.omega


def _kneg_zeta_gap(dim: SphereDim, s: float, gap, spec):
    nu = dim.nu
    const = (2.0 / nu) ** (s - 0.5) * math.gamma(s + 0.5) / math.gamma(2.0 * s)

    def f(t, g):
        b = bessel_i_scaled(s - 0.5, nu * t) * t ** (s - 0.5)
        return _poisson_t_minus_mean(dim, t, g) * b[:, None]

    meta = IntegrandMeta(2.0 * s - 1.0, 1.0)
    return const * _time_integral(f, meta, spec, gap)


def _kneg_heat_gap(dim: SphereDim, s: float, gap, spec):
    def f(t, g):
        return heat_series(dim, t, g, drop_mean=True) * (t ** (s - 1.0))[:, None]

    meta = IntegrandMeta(s - 1.0, float(dim.n - 1))
    return _time_integral(f, meta, spec, gap) / math.gamma(s)


def _ks_gap(dim: SphereDim, s: float, gap, spec):
    split = spec.split_point

    def f(t, g):
        return heat_series(dim, t, g, drop_mean=t >= split) * (t ** (-1.0 - s))[:, None]

    meta = IntegrandMeta(0.0, float(dim.n - 1))
    val = _time_integral(f, meta, spec, gap) + split ** (-s) / (s * dim.omega)
    return val / abs(math.gamma(-s))


def _l2s_gap(dim: SphereDim, s: float, gap, spec):
    nu = dim.nu

    def f(t, g):
        return _poisson_t(dim, t, g) * (np.exp(-nu * t) * t ** (-1.0 - 2.0 * s))[:, None]

    meta = IntegrandMeta(-2.0 * s, nu)
    return _time_integral(f, meta, spec, gap) / abs(math.gamma(-2.0 * s))


def _ss_gap(dim: SphereDim, s: float, gap, spec):
    nu = dim.nu
    rho = -s - 0.5

    def f(t, g):
        b = bessel_b_scaled(rho, nu * t) * t ** (-0.5 - s)
        return _poisson_t_minus_mean(dim, t, g) * b[:, None]

    meta = IntegrandMeta(1.0 - 2.0 * s, 1.0)
    # The constant 1/omega part integrates in closed form through J(0, nu, s).
    mean_part = minak_integral(0, nu, s, spec) / dim.omega
    return _minak_constant(nu, s) * (_time_integral(f, meta, spec, gap) + mean_part)


def _evaluate(fn, dim, s, tau, spec):
    tau, gap = _gaps(dim, tau)
    out = fn(dim, s, gap.reshape(-1), spec).reshape(gap.shape)
    return float(out) if out.ndim == 0 else out


def _check_pos(s):
    if not (0.0 < s < 1.0):
        raise DomainError(f"s={s} must lie in (0, 1)")


def kernel_Kneg_zeta(dim: SphereDim, s: float, tau, spec: QuadratureSpec = KERNEL_SPEC):
    """Kernel of ``(-Delta)^(-s)`` from the Poisson-Bessel integral.

    ``K_{-s}(tau) = (2/nu)^(s-1/2) Gamma(s+1/2)/Gamma(2s)
    int_0^inf exp(-nu t) (P_{exp(-t)}(tau) - 1/omega) I_{s-1/2}(nu t) t^(s-1/2) dt``.

    Valid for every ``s > 0``.
    """
    if not s > 0:
        raise DomainError("s must be positive")
    return _evaluate(_kneg_zeta_gap, dim, s, tau, spec)


def kernel_Kneg_heat(dim: SphereDim, s: float, tau, spec: QuadratureSpec = KERNEL_SPEC):
    """Kernel of ``(-Delta)^(-s)`` by heat subordination.

    ``K_{-s}(tau) = (1/Gamma(s)) int_0^inf (W_t(tau) - 1/omega) t^(s-1) dt``,
    for ``0 < s < (n-1)/2``.  The mean is removed so that the kernel acts
    on mean-zero functions and the integral converges at large ``t``.
    """
    if not (0.0 < s < 0.5 * (dim.n - 1)):
        raise DomainError(f"heat route needs 0 < s < (n-1)/2 = {0.5 * (dim.n - 1)}")
    return _evaluate(_kneg_heat_gap, dim, s, tau, spec)


def kernel_Ks(dim: SphereDim, s: float, tau, spec: QuadratureSpec = KERNEL_SPEC):
    """Kernel of ``(-Delta)^s``: ``(1/|Gamma(-s)|) int_0^inf W_t(tau) t^(-1-s) dt``."""
    _check_pos(s)
    return _evaluate(_ks_gap, dim, s, tau, spec)


def kernel_L2s(dim: SphereDim, s: float, tau, spec: QuadratureSpec = KERNEL_SPEC):
    """Kernel of ``(L + nu)^(2s)``, ``2s`` in (0, 1).

    ``L_{2s}(tau) = (1/|Gamma(-2s)|) int_0^inf exp(-nu t) P_{exp(-t)}(tau) t^(-1-2s) dt``.
    """
    FracOrder(s, "dtn")
    return _evaluate(_l2s_gap, dim, s, tau, spec)


def kernel_Ss(dim: SphereDim, s: float, tau, spec: QuadratureSpec = KERNEL_SPEC):
    """Kernel of ``S^s = (-Delta)^s - (L + nu)^(2s)``.

    ``S_s(tau) = (2nu)^(s+1/2) sqrt(pi)/Gamma(-s)
    int_0^inf exp(-nu t) P_{exp(-t)}(tau) B_{-s-1/2}(nu t) t^(-1/2-s) dt``.
    """
    _check_pos(s)
    return _evaluate(_ss_gap, dim, s, tau, spec)


def _near_corrections(p: float) -> tuple:
    return (2.0 - p, 0.0)


def _profile(dim, fn, s, p, coeff, label, route, d_min, spec):
    def gap_eval(g):
        g = np.asarray(g, dtype=float)
        return fn(dim, s, g.reshape(-1), spec).reshape(g.shape)

    return KernelProfile(
        dim,
        gap_eval,
        singularity=p,
        label=label,
        params={"s": s, "route": route},
        near=NearModel(coeff, p, _near_corrections(p)) if p > 0 else None,
        d_min=d_min,
    )


def profile_Ks(dim: SphereDim, s: float, spec: QuadratureSpec = KERNEL_SPEC) -> KernelProfile:
    _check_pos(s)
    m = dim.n - 1
    return _profile(dim, _ks_gap, s, m + 2 * s, flat_constant_pos(m, s), "Kpos", "heat", D_MIN_HEAT, spec)


def profile_Kneg(dim: SphereDim, s: float, route: str = "zeta", spec: QuadratureSpec = KERNEL_SPEC) -> KernelProfile:
    """Profile of ``K_{-s}``; ``route`` is ``'zeta'`` or ``'heat'``."""
    m = dim.n - 1
    if not s > 0:
        raise DomainError("s must be positive")
    if route == "heat":
        if not s < 0.5 * m:
            raise DomainError(f"heat route needs s < (n-1)/2 = {0.5 * m}")
        fn, d_min = _kneg_heat_gap, D_MIN_HEAT
    elif route == "zeta":
        fn, d_min = _kneg_zeta_gap, D_MIN_POISSON
    else:
        raise DomainError(f"unknown route {route!r}")
    if s < 0.5 * m:
        p, coeff = m - 2 * s, flat_constant_neg(m, s)
    else:
        # Bounded (or logarithmic) kernel; no power-law model applies.
        p, coeff = 0.0, 0.0
    return _profile(dim, fn, s, p, coeff, "Kneg", route, d_min, spec)


def profile_L2s(dim: SphereDim, s: float, spec: QuadratureSpec = KERNEL_SPEC) -> KernelProfile:
    FracOrder(s, "dtn")
    m = dim.n - 1
    return _profile(dim, _l2s_gap, s, m + 2 * s, flat_constant_pos(m, s), "L2s", "poisson", D_MIN_POISSON, spec)


def ss_leading_constant(dim: SphereDim, s: float) -> float:
    """Leading coefficient of ``S_s ~ c d^-(n-3+2s)`` near the diagonal.

    The symbol difference ``lambda^s - (lambda + nu^2)^s`` starts with
    ``-s nu^2 lambda^(s-1)``, a Riesz potential of order ``2 - 2s``.
    """
    m = dim.n - 1
    return -s * dim.nu ** 2 * flat_constant_neg(m, 1.0 - s)


def profile_Ss(dim: SphereDim, s: float, spec: QuadratureSpec = KERNEL_SPEC) -> KernelProfile:
    _check_pos(s)
    p = dim.n - 3 + 2 * s
    return _profile(dim, _ss_gap, s, p, ss_leading_constant(dim, s), "Ss", "poisson", D_MIN_POISSON, spec)


# ----------------------------------------------------------------------
# application at the pole


CoeffArg = Union[ZonalCoeffs, Sequence[ZonalCoeffs]]


def _as_list(c: CoeffArg):
    if isinstance(c, ZonalCoeffs):
        return [c], True
    items = list(c)
    if not items:
        raise DomainError("empty coefficient list")
    dims = {x.dim for x in items}
    if len(dims) != 1:
        raise DomainError("all inputs must share one dimension")
    return items, False


def _stack_weight(items, subtracted: bool) -> Callable:
    K = max(x.K for x in items)
    A = np.zeros((len(items), K + 1))
    for i, x in enumerate(items):
        A[i, : x.K + 1] = x.a
    dim = items[0].dim
    nu = dim.nu
    k = np.arange(K + 1)
    f = (k + nu) / nu / dim.omega

    def weight(g):
        g = np.asarray(g, dtype=float)
        T = gegenbauer_gap_all(K, nu, g) if subtracted else gegenbauer_all(K, nu, 1.0 - g)
        return (T.T * f) @ A.T

    return weight


def _apply(profile: KernelProfile, c: CoeffArg, subtracted: bool, spec: QuadratureSpec):
    items, single = _as_list(c)
    weight = _stack_weight(items, subtracted)
    r = pole_integral(profile, weight, spec, weight_order=2.0 if subtracted else 0.0)
    val = np.atleast_1d(r.value)
    return float(val[0]) if single else val


def apply_frac_at_pole(c: CoeffArg, s: float, spec: QuadratureSpec = APPLY_SPEC, kernel_spec: QuadratureSpec = KERNEL_SPEC):
    """``(-Delta)^s u`` at the pole through the kernel ``K_s``.

    Computes ``omega_{n-2} int (g(1) - g(tau)) K_s(tau) (1-tau^2)^((n-3)/2) dtau``.
    At the pole a smooth zonal function is critical, so this subtracted
    form converges absolutely for every ``s`` in (0, 1).

    Parameters
    ----------
    c : ZonalCoeffs or sequence of ZonalCoeffs
        A sequence is evaluated against one shared kernel evaluation and
        returns an array.
    """
    items, _ = _as_list(c)
    prof = profile_Ks(items[0].dim, s, kernel_spec)
    return _apply(prof, c, True, spec)


def apply_neg_at_pole(
    c: CoeffArg, s: float, spec: QuadratureSpec = APPLY_SPEC, route: str = "zeta", kernel_spec: QuadratureSpec = KERNEL_SPEC
):
    """``(-Delta)^(-s) u`` at the pole through the kernel ``K_{-s}``.

    Raises
    ------
    MeanNotZeroError
        If an input has ``a_0 != 0``.
    DomainError
        If ``s >= (n-1)/2``, where the kernel is no longer a pure power.
    """
    items, _ = _as_list(c)
    for x in items:
        _check_mean_zero(x)
    dim = items[0].dim
    if not (0.0 < s < 0.5 * (dim.n - 1)):
        raise DomainError(f"kernel route needs 0 < s < (n-1)/2 = {0.5 * (dim.n - 1)}")
    prof = profile_Kneg(dim, s, route, kernel_spec)
    return _apply(prof, c, False, spec)


def apply_L2s_at_pole(c: CoeffArg, two_s: float, spec: QuadratureSpec = APPLY_SPEC, kernel_spec: QuadratureSpec = KERNEL_SPEC):
    """``(L + nu)^(2s) u`` at the pole, ``2s`` in (0, 1).

    Subtracted kernel integral plus the local term ``nu^(2s) u(e)``.
    """
    if not (0.0 < two_s < 1.0):
        raise DomainError("two_s must lie in (0, 1)")
    items, single = _as_list(c)
    dim = items[0].dim
    prof = profile_L2s(dim, 0.5 * two_s, kernel_spec)
    vals = np.atleast_1d(_apply(prof, items, True, spec))
    local = dim.nu ** two_s * np.array([x.pole_value() for x in items])
    out = vals + local
    return float(out[0]) if single else out


def apply_Ss_at_pole(c: CoeffArg, s: float, spec: QuadratureSpec = APPLY_SPEC, kernel_spec: QuadratureSpec = KERNEL_SPEC):
    """``S^s u`` at the pole: ``omega_{n-2} int S_s(tau) g(tau) (1-tau^2)^((n-3)/2) dtau``."""
    items, _ = _as_list(c)
    prof = profile_Ss(items[0].dim, s, kernel_spec)
    return _apply(prof, c, False, spec)


def decompose(c: CoeffArg, s: float, spec: QuadratureSpec = APPLY_SPEC, kernel_spec: QuadratureSpec = KERNEL_SPEC):
    """Check ``(-Delta)^s = (L + nu)^(2s) + S^s`` at the pole, ``s`` in (0, 1/2).

    Returns
    -------
    DecompositionReport or list of DecompositionReport
    """
    if not (0.0 < s < 0.5):
        raise DomainError("decompose needs s in (0, 1/2)")
    items, single = _as_list(c)
    lhs = [spectral_frac(x, FracOrder(s)).pole_value() for x in items]
    dtn = np.atleast_1d(apply_L2s_at_pole(items, 2.0 * s, spec, kernel_spec))
    smooth = np.atleast_1d(apply_Ss_at_pole(items, s, spec, kernel_spec))
    reports = [DecompositionReport(float(a), float(b), float(c_)) for a, b, c_ in zip(lhs, dtn, smooth)]
    return reports[0] if single else reports


# ----------------------------------------------------------------------
# exponent estimation


def exponent_fit(evaluator: Callable, d_lo: float, d_hi: float, points: int = 12) -> SlopeFit:
    """Least-squares slope of ``log|K(d)|`` against ``log d``.

    Parameters
    ----------
    evaluator : callable
        Vectorized kernel as a function of geodesic distance ``d``.
    d_lo, d_hi : float
        Fitting range, ``0 < d_lo < d_hi``.
    points : int
        Number of log-spaced sample distances.

    Raises
    ------
    DomainError
        If the kernel changes sign on the range.
    """
    if not (0 < d_lo < d_hi):
        raise DomainError("need 0 < d_lo < d_hi")
    if points < 3:
        raise DomainError("need at least 3 points")
    d = np.geomspace(d_lo, d_hi, points)
    v = np.asarray(evaluator(d), dtype=float)
    if not (np.all(v > 0) or np.all(v < 0)):
        raise DomainError("kernel changes sign on the fitting range")
    x = np.log(d)
    y = np.log(np.abs(v))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, _, _ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = max(points - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(A.T @ A)
    half = 2.0 * math.sqrt(max(cov[0, 0], 0.0))
    return SlopeFit(float(coef[0]), half, float(coef[1]))
