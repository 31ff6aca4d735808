"""Special functions used throughout the package.

Gamma, Gegenbauer polynomials, the modified Bessel functions
:math:`I_\\rho`, its tail :math:`B_\\rho` (the series without its first
term) and the second-kind function :math:`K_s`, the Hurwitz zeta function
and the surface area of the unit sphere.

Bessel-type functions accept scalars or arrays for ``z`` and return the
matching shape.  The ``*_scaled`` variants return ``exp(-z) * f(z)`` and
never overflow, which is the form used inside time integrals.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "gamma",
    "rgamma",
    "lgamma_sign",
    "gegenbauer_all",
    "gegenbauer_gap_all",
    "gegenbauer_at_one",
    "bessel_i",
    "bessel_i_scaled",
    "bessel_b",
    "bessel_b_scaled",
    "bessel_k2",
    "bessel_asymptotic_coeffs",
    "hurwitz_zeta",
    "surface_area",
]

# Crossover between the power series and the large-argument expansion of I.
BESSEL_CROSSOVER = 25.0

_BERNOULLI_2J = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_ZETA_N = 20


def _is_pole(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma(x: float) -> float:
    """Gamma function for real arguments.

    Parameters
    ----------
    x : float
        Argument, not a nonpositive integer.

    Returns
    -------
    float

    Raises
    ------
    PoleError
        If ``x`` is 0, -1, -2, ...

    Examples
    --------
    >>> round(gamma(0.5) ** 2, 12) == round(math.pi, 12)
    True
    """
    x = float(x)
    if _is_pole(x):
        raise PoleError(f"gamma has a pole at x={x:g}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma function, equal to zero at the poles of Gamma."""
    x = float(x)
    if _is_pole(x):
        return 0.0
    if x > 171.0:
        return 0.0
    return 1.0 / math.gamma(x)


def lgamma_sign(x: float) -> tuple[float, float]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``."""
    x = float(x)
    if _is_pole(x):
        raise PoleError(f"gamma has a pole at x={x:g}")
    if x > 0:
        return math.lgamma(x), 1.0
    # Gamma alternates in sign between consecutive negative integers.
    sign = -1.0 if math.floor(x) % 2 else 1.0
    return math.lgamma(x), sign


def gegenbauer_at_one(k: int, nu: float) -> float:
    """Value ``C_k^nu(1) = binom(k + 2 nu - 1, k)``."""
    val = 1.0
    for j in range(1, k + 1):
        val *= (j + 2.0 * nu - 1.0) / j
    return val


def gegenbauer_all(K: int, nu: float, tau) -> np.ndarray:
    """Gegenbauer polynomials ``C_0^nu .. C_K^nu`` by three-term recurrence.

    Parameters
    ----------
    K : int
        Highest degree, ``K >= 0``.
    nu : float
        Parameter, ``nu > 0``.
    tau : float or array_like
        Evaluation points in ``[-1, 1]``.

    Returns
    -------
    ndarray
        Shape ``(K + 1,) + shape(tau)``.
    """
    if K < 0:
        raise DomainError("K must be nonnegative")
    if nu <= 0:
        raise DomainError("nu must be positive")
    tau = np.asarray(tau, dtype=float)
    out = np.empty((K + 1,) + tau.shape)
    out[0] = 1.0
    if K == 0:
        return out
    out[1] = 2.0 * nu * tau
    for k in range(1, K):
        out[k + 1] = (2.0 * (k + nu) * tau * out[k] - (k + 2.0 * nu - 1.0) * out[k - 1]) / (k + 1)
    return out


def gegenbauer_gap_all(K: int, nu: float, gap) -> np.ndarray:
    """Differences ``C_k(1) - C_k(1 - gap)`` for ``k = 0..K``.

    The recurrence runs directly on the differences, so the result keeps
    full relative accuracy when ``gap`` is tiny.
    """
    gap = np.asarray(gap, dtype=float)
    tau = 1.0 - gap
    out = np.empty((K + 1,) + gap.shape)
    out[0] = 0.0
    if K == 0:
        return out
    out[1] = 2.0 * nu * gap
    c_one = 2.0 * nu
    c_prev_one = 1.0
    for k in range(1, K):
        lead = c_one * gap + tau * out[k]
        out[k + 1] = (2.0 * (k + nu) * lead - (k + 2.0 * nu - 1.0) * out[k - 1]) / (k + 1)
        c_one, c_prev_one = (2.0 * (k + nu) * c_one - (k + 2.0 * nu - 1.0) * c_prev_one) / (k + 1), c_one
    return out


def _series_terms_start(rho: float, start: int) -> int:
    # For rho = -j the terms with m + rho + 1 <= 0 vanish identically.
    m0 = start
    while _is_pole(m0 + rho + 1.0):
        m0 += 1
    return m0


def _bessel_series(rho: float, z: np.ndarray, start: int) -> np.ndarray:
    """Sum ``sum_{m >= start} (z/2)^(2m+rho) / (m! Gamma(m+rho+1))``."""
    m0 = _series_terms_start(rho, start)
    half = 0.5 * z
    logc, sign = lgamma_sign(m0 + rho + 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        term = sign * half ** (2 * m0 + rho) * math.exp(-math.lgamma(m0 + 1.0) - logc)
    term = np.where(np.isnan(term), 0.0, term)
    total = term.copy()
    q = half * half
    m = m0
    while True:
        m += 1
        term = term * q / (m * (m + rho))
        total = total + term
        with np.errstate(invalid="ignore"):
            small = np.abs(term) <= 1e-17 * np.abs(total)
        if np.all(small | (term == 0)) or m > m0 + 400:
            break
    return total


def bessel_asymptotic_coeffs(rho: float, count: int) -> np.ndarray:
    """Coefficients ``a_j(rho)`` of the large-argument Bessel expansions.

    ``a_j = prod_{i=1..j} (4 rho^2 - (2i-1)^2) / (j! 8^j)``.
    """
    mu = 4.0 * rho * rho
    out = np.empty(count)
    out[0] = 1.0
    for j in range(1, count):
        out[j] = out[j - 1] * (mu - (2 * j - 1) ** 2) / (8.0 * j)
    return out


def _bessel_i_asym_scaled(rho: float, z: np.ndarray) -> np.ndarray:
    coeffs = bessel_asymptotic_coeffs(rho, 60)
    total = np.zeros_like(z)
    term_prev = np.full_like(z, np.inf)
    done = np.zeros(z.shape, dtype=bool)
    for j, a in enumerate(coeffs):
        term = (-1) ** j * a / z ** j
        # Stop each entry once terms become negligible or start to grow.
        grow = np.abs(term) > np.abs(term_prev)
        done |= grow
        total = np.where(done, total, total + term)
        done |= np.abs(term) <= 1e-17 * np.abs(total)
        term_prev = term
        if np.all(done):
            break
    return total / np.sqrt(2.0 * math.pi * z)


def _as_array(z):
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0):
        raise DomainError("Bessel argument must be nonnegative")
    return arr


def _wrap(out, z):
    return float(out) if np.ndim(z) == 0 else out


def bessel_i_scaled(rho: float, z):
    """``exp(-z) * I_rho(z)`` for ``z >= 0``.

    Below the crossover the power series is summed directly; above it
    the large-argument expansion is used.
    """
    zz = _as_array(z)
    flat = np.atleast_1d(zz).astype(float)
    out = np.empty_like(flat)
    lo = flat <= BESSEL_CROSSOVER
    if np.any(lo):
        out[lo] = _bessel_series(rho, flat[lo], 0) * np.exp(-flat[lo])
    if np.any(~lo):
        out[~lo] = _bessel_i_asym_scaled(rho, flat[~lo])
    return _wrap(out.reshape(zz.shape), z)


def bessel_i(rho: float, z):
    """Modified Bessel function of the first kind ``I_rho(z)``.

    Parameters
    ----------
    rho : float
        Order.  Negative integers are allowed and give ``I_{-j} = I_j``.
    z : float or array_like
        Argument, ``z >= 0``.

    Raises
    ------
    OverflowError
        If the value exceeds the floating point range.
    """
    zz = _as_array(z)
    if np.any(zz > 700.0):
        raise OverflowError("bessel_i overflows for z > 700; use bessel_i_scaled")
    return _wrap(np.asarray(bessel_i_scaled(rho, zz)) * np.exp(zz), z)


def bessel_b_scaled(rho: float, z):
    """``exp(-z) * B_rho(z)`` where ``B_rho = I_rho`` minus its first series term."""
    zz = _as_array(z)
    flat = np.atleast_1d(zz).astype(float)
    out = np.empty_like(flat)
    lo = flat <= BESSEL_CROSSOVER
    if np.any(lo):
        out[lo] = _bessel_series(rho, flat[lo], 1) * np.exp(-flat[lo])
    if np.any(~lo):
        # The first term is smaller than I by a factor exp(-z) here, so
        # removing it costs no accuracy.
        hi = flat[~lo]
        first = np.exp(rho * np.log(0.5 * hi) - hi) * rgamma(rho + 1.0)
        out[~lo] = _bessel_i_asym_scaled(rho, hi) - first
    return _wrap(out.reshape(zz.shape), z)


def bessel_b(rho: float, z):
    """Tail ``B_rho(z) = sum_{m>=1} (z/2)^(2m+rho) / (m! Gamma(m+rho+1))``."""
    zz = _as_array(z)
    if np.any(zz > 700.0):
        raise OverflowError("bessel_b overflows for z > 700; use bessel_b_scaled")
    return _wrap(np.asarray(bessel_b_scaled(rho, zz)) * np.exp(zz), z)


def _k2_integral_scaled(s: float, z: np.ndarray) -> np.ndarray:
    # exp(z) K_s(z) = int_0^inf exp(-z (cosh u - 1)) cosh(s u) du, trapezoid rule.
    # The integrand is analytic in |Im u| < pi/2, so the error is ~exp(-pi^2/h).
    h = 0.1
    umax = math.acosh(1.0 + 46.0 / float(np.min(z)))
    u = np.arange(0.0, umax + h, h)
    w = np.full(u.shape, h)
    w[0] = 0.5 * h
    vals = np.exp(-np.outer(z, np.cosh(u) - 1.0)) * np.cosh(s * u)
    return vals @ w


def _k2_asym_scaled(s: float, z: np.ndarray) -> np.ndarray:
    coeffs = bessel_asymptotic_coeffs(s, 30)
    total = np.zeros_like(z)
    for j, a in enumerate(coeffs):
        total = total + a / z ** j
    return total * np.sqrt(0.5 * math.pi / z)


def bessel_k2(s: float, z):
    """Modified Bessel function of the second kind ``K_s(z)`` for ``s`` in (0, 1).

    Parameters
    ----------
    s : float
        Order, at least ``1e-3`` away from 0 and 1.
    z : float or array_like
        Positive argument.

    Notes
    -----
    Small ``z`` uses the reflection formula
    ``pi/2 (I_{-s} - I_s) / sin(pi s)``.  For ``z > 2`` that difference
    cancels badly, so the integral ``int exp(-z cosh u) cosh(su) du`` is
    summed by the trapezoid rule instead; ``z > 40`` uses the asymptotic
    expansion.
    """
    if not (1e-3 <= s <= 1.0 - 1e-3):
        raise DomainError(f"bessel_k2 order s={s} must lie in [1e-3, 1-1e-3]")
    zz = np.asarray(z, dtype=float)
    if np.any(zz <= 0):
        raise DomainError("bessel_k2 argument must be positive")
    flat = np.atleast_1d(zz)
    out = np.empty_like(flat)
    lo = flat <= 2.0
    mid = (flat > 2.0) & (flat <= 40.0)
    hi = flat > 40.0
    if np.any(lo):
        x = flat[lo]
        diff = _bessel_series(-s, x, 0) - _bessel_series(s, x, 0)
        out[lo] = 0.5 * math.pi * diff / math.sin(math.pi * s)
    if np.any(mid):
        x = flat[mid]
        out[mid] = _k2_integral_scaled(s, x) * np.exp(-x)
    if np.any(hi):
        x = flat[hi]
        with np.errstate(under="ignore"):
            out[hi] = _k2_asym_scaled(s, x) * np.exp(-x)
    return _wrap(out.reshape(zz.shape), z)


def hurwitz_zeta(sigma: float, x):
    """Hurwitz zeta function ``zeta(sigma, x) = sum_k (k + x)^(-sigma)``.

    Evaluated by Euler-Maclaurin summation with 20 explicit terms and 8
    Bernoulli corrections, which also gives the analytic continuation for
    ``sigma < 1``.

    Parameters
    ----------
    sigma : float
        Exponent, ``sigma != 1``.
    x : float or array_like
        Shift, ``x > 0``.

    Raises
    ------
    PoleError
        At ``sigma == 1``.
    """
    if sigma == 1.0:
        raise PoleError("hurwitz_zeta has a pole at sigma=1")
    xx = np.asarray(x, dtype=float)
    if np.any(xx <= 0):
        raise DomainError("hurwitz_zeta requires x > 0")
    k = np.arange(_ZETA_N, dtype=float)
    head = np.sum((xx[..., None] + k) ** (-sigma), axis=-1)
    a = xx + _ZETA_N
    total = head + a ** (1.0 - sigma) / (sigma - 1.0) + 0.5 * a ** (-sigma)
    rising = sigma
    fact = 2.0
    power = a ** (-sigma - 1.0)
    for j, b in enumerate(_BERNOULLI_2J, start=1):
        total = total + b / fact * rising * power
        rising *= (sigma + 2 * j - 1) * (sigma + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
        power = power / (a * a)
    return _wrap(total, x)


def surface_area(n: int) -> float:
    """Surface area ``omega_{n-1} = 2 pi^(n/2) / Gamma(n/2)`` of the unit sphere in R^n."""
    if n < 2:
        raise DomainError("surface_area needs n >= 2")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
