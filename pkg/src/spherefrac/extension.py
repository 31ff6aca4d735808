"""Extension problem for fractional powers of the Laplacian on the sphere.

Given ``u = sum_k a_k Z_k``, the solution of

    Delta_x U + (1 - 2s)/y dU/dy + d^2U/dy^2 = 0,   U(x, 0) = u(x)

is ``U(., y) = sum_k m_k(y) a_k Z_k`` with the Bessel multiplier
``m_k(y) = 2^(1-s)/Gamma(s) (y sqrt(lambda_k))^s K_s(y sqrt(lambda_k))``.
The weighted normal derivative ``-y^(1-2s) dU/dy`` at ``y = 0+`` recovers
``(-Delta)^s u`` up to the factor ``Gamma(1-s) / (4^(s-1/2) Gamma(s))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, MeanNotZeroError
from .quadrature import IntegrandMeta, QuadratureSpec, integrate_time, tanh_sinh
from .specfun import bessel_k2
from .zonal import ZonalCoeffs, eigenvalues, synthesize, zonal_at_pole

__all__ = [
    "ExtensionField",
    "TraceReport",
    "EXTENSION_SPEC",
    "DEFAULT_LADDER",
    "multipliers",
    "extend",
    "extend_via_heat",
    "extension_field",
    "neumann_constant",
    "neumann_trace",
    "pde_residual",
    "neumann_problem_negative",
]

EXTENSION_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12, max_levels=11)
DEFAULT_LADDER = tuple(0.2 * 0.5 ** j for j in range(6))


def _check_s(s: float) -> None:
    if not (1e-3 <= s <= 1.0 - 1e-3):
        raise DomainError(f"extension order s={s} must lie in [1e-3, 1-1e-3]")


def multipliers(dim, K: int, s: float, y) -> np.ndarray:
    """Bessel multipliers ``m_k(y)`` for ``k = 0..K``.

    Parameters
    ----------
    y : float or array_like
        Heights, all positive.

    Returns
    -------
    ndarray, shape (K+1,) + shape(y)
        Row ``k = 0`` is identically one.
    """
    _check_s(s)
    yy = np.asarray(y, dtype=float)
    if np.any(yy <= 0):
        raise DomainError("heights must be positive")
    root = np.sqrt(eigenvalues(dim, K))
    out = np.ones((K + 1,) + yy.shape)
    if K == 0:
        return out
    z = root[1:].reshape((-1,) + (1,) * yy.ndim) * yy
    with np.errstate(under="ignore"):
        out[1:] = 2.0 ** (1.0 - s) / math.gamma(s) * z ** s * bessel_k2(s, z)
    return out


def extend(c: ZonalCoeffs, s: float, y: float) -> ZonalCoeffs:
    """Coefficients of ``U(., y)``: ``a_k -> m_k(y) a_k``.

    Examples
    --------
    >>> from spherefrac.zonal import SphereDim
    >>> c = ZonalCoeffs.one_hot(SphereDim(3), 1)
    >>> bool(abs(extend(c, 0.5, 0.7).a[1] - math.exp(-0.7 * math.sqrt(2))) < 1e-12)
    True
    """
    return c.scaled(multipliers(c.dim, c.K, s, float(y)))


def _heat_tail(a: float, s: float, T: float, terms: int = 40) -> float:
    # int_T^inf exp(-a/t) t^(-1-s) dt = sum_j (-a)^j / j! T^(-s-j) / (s+j), for a < T
    total = 0.0
    term = 1.0
    for j in range(terms):
        total += term * T ** (-s - j) / (s + j)
        term *= -a / (j + 1)
    return total


def _log_time_integral(g, t_lo: float, t_hi: float, spec: QuadratureSpec):
    """``int g(t) dt`` over ``[t_lo, t_hi]`` in the variable ``v = log t``.

    Subordination integrands concentrate near ``t = y^2/4`` and spread
    over many decades; in ``v`` they are smooth bumps.
    """

    def h(v):
        t = np.exp(v)
        vals = np.asarray(g(t), dtype=float)
        return vals * t.reshape((-1,) + (1,) * (vals.ndim - 1))

    return tanh_sinh(h, math.log(t_lo), math.log(t_hi), abs_tol=spec.abs_tol, rel_tol=spec.rel_tol, max_levels=spec.max_levels)


def _gauss_window(a: float, lam_min: float, hi_scale: float = 45.0):
    # exp(-a/t) < exp(-45) below t_lo; exp(-lam_min t) < exp(-45) above t_hi.
    return a / hi_scale, hi_scale / lam_min


def extend_via_heat(c: ZonalCoeffs, s: float, y: float, spec: QuadratureSpec = EXTENSION_SPEC) -> ZonalCoeffs:
    """Coefficients of ``U(., y)`` from the heat-semigroup formula.

    ``m_k(y) = y^(2s) / (4^s Gamma(s)) int_0^inf exp(-y^2/4t) exp(-t lambda_k) t^(-1-s) dt``.
    The integral is taken in ``log t``.  The constant mode decays only
    like ``t^(-1-s)`` and is closed with a convergent tail series.

    Raises
    ------
    ToleranceError
        If the quadrature cannot meet ``spec``.
    """
    _check_s(s)
    if not y > 0:
        raise DomainError("height must be positive")
    a = 0.25 * y * y
    lam = eigenvalues(c.dim, c.K)
    pref = y ** (2.0 * s) / (4.0 ** s * math.gamma(s))
    # Tolerances refer to the multipliers, which are O(1).
    sub = QuadratureSpec(min(spec.abs_tol / pref, 0.5), spec.rel_tol, spec.max_levels)
    mult = np.empty(c.K + 1)

    T = 40.0 * max(a, 1.0)

    def f0(t):
        with np.errstate(under="ignore"):
            return np.exp(-a / t) * t ** (-1.0 - s)

    r0 = _log_time_integral(f0, a / 45.0, T, sub)
    mult[0] = pref * (r0.value + _heat_tail(a, s, T))
    if c.K >= 1:
        lk = lam[1:]

        def f(t):
            with np.errstate(under="ignore"):
                return np.exp(-a / t[:, None] - np.outer(t, lk)) * (t ** (-1.0 - s))[:, None]

        lo, hi = _gauss_window(a, float(lk[0]))
        r = _log_time_integral(f, lo, max(hi, 2.0 * lo), sub)
        mult[1:] = pref * np.atleast_1d(r.value)
    return c.scaled(mult)


@dataclass(frozen=True)
class ExtensionField:
    """The extension ``U(x, y)`` as height-dependent zonal coefficients.

    Attributes
    ----------
    base : ZonalCoeffs
        Boundary data ``u``.
    s : float
    heights : ndarray
        Positive heights ``y_j``.
    mult : ndarray, shape (K+1, len(heights))
        Multipliers ``m_k(y_j)``.
    """

    base: ZonalCoeffs
    s: float
    heights: np.ndarray
    mult: np.ndarray = field(repr=False)

    def at(self, j: int) -> ZonalCoeffs:
        """Coefficients of ``U(., heights[j])``."""
        return self.base.scaled(self.mult[:, j])

    def evaluate(self, tau) -> np.ndarray:
        """``U`` on a grid, shape ``(len(tau), len(heights))``."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return np.stack([synthesize(self.at(j), tau) for j in range(self.heights.size)], axis=1)


def extension_field(c: ZonalCoeffs, s: float, heights: Sequence[float]) -> ExtensionField:
    h = np.asarray(heights, dtype=float).reshape(-1)
    m = multipliers(c.dim, c.K, s, h)
    h.setflags(write=False)
    m.setflags(write=False)
    return ExtensionField(c, s, h, m)


def neumann_constant(s: float) -> float:
    """``Gamma(1-s) / (4^(s-1/2) Gamma(s))``."""
    return math.gamma(1.0 - s) / (4.0 ** (s - 0.5) * math.gamma(s))


@dataclass(frozen=True)
class TraceReport:
    """Weighted Neumann derivative at the pole against its spectral target."""

    neumann_estimate: float
    target: float
    rel_error: float
    ladder_values: tuple = ()


def _weighted_derivative(c: ZonalCoeffs, s: float, y: float) -> float:
    # -y^(1-2s) dU/dy at the pole, fourth-order centred difference with h = y/100.
    h = 0.01 * y
    ys = y + h * np.array([-2.0, -1.0, 1.0, 2.0])
    m = multipliers(c.dim, c.K, s, ys)
    d = (m[:, 0] - 8.0 * m[:, 1] + 8.0 * m[:, 2] - m[:, 3]) / (12.0 * h)
    z1 = c.a * zonal_at_pole(c.dim, c.K)
    return float(-(y ** (1.0 - 2.0 * s)) * np.dot(d, z1))


def _richardson(values: np.ndarray, exponents: Sequence[float], ratio: float) -> np.ndarray:
    # Tableau diagonal; values[j] is sampled at y_0 * ratio^j.
    cur = np.asarray(values, dtype=float)
    diag = [cur[-1]]
    for p in exponents:
        if cur.size < 2:
            break
        f = ratio ** p
        cur = (cur[1:] - f * cur[:-1]) / (1.0 - f)
        diag.append(cur[-1])
    return np.array(diag)


def neumann_trace(c: ZonalCoeffs, s: float, y_ladder: Sequence[float] = DEFAULT_LADDER) -> TraceReport:
    """Estimate ``-y^(1-2s) dU/dy`` at ``y = 0+`` and the pole.

    Centred differences on a geometric ladder of heights (ratio 1/2)
    followed by Richardson extrapolation in the powers
    ``y^(2-2s), y^2, y^(4-2s), y^4, ...`` of the small-height expansion.

    Warns
    -----
    RuntimeWarning
        If successive extrapolants stop improving.
    """
    _check_s(s)
    ys = np.asarray(y_ladder, dtype=float)
    if ys.size < 2 or np.any(ys <= 0) or np.any(np.diff(ys) >= 0):
        raise DomainError("ladder must be a decreasing sequence of at least two positive heights")
    ratio = ys[1] / ys[0]
    if not np.allclose(ys[1:] / ys[:-1], ratio, rtol=1e-12, atol=0.0):
        raise DomainError("ladder must be geometric")
    vals = np.array([_weighted_derivative(c, s, y) for y in ys])
    exps = []
    j = 1
    while len(exps) < ys.size - 1:
        exps.extend([2.0 * j - 2.0 * s, 2.0 * j])
        j += 1
    diag = _richardson(vals, exps[: ys.size - 1], ratio)
    steps = np.abs(np.diff(diag))
    if steps.size >= 3 and steps[-1] > steps[-2] > steps[-3] and steps[-1] > 1e-12 * max(1.0, abs(diag[-1])):
        warnings.warn("Richardson extrapolation of the Neumann trace is not converging", RuntimeWarning, stacklevel=2)
    est = float(diag[-1])
    lam = eigenvalues(c.dim, c.K)
    target = neumann_constant(s) * float(np.dot(c.a * lam ** s, zonal_at_pole(c.dim, c.K)))
    rel = abs(est - target) / max(1.0, abs(target))
    return TraceReport(est, target, rel, tuple(float(v) for v in vals))


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def pde_residual(c: ZonalCoeffs, s: float, tau_grid, y_grid, dy: float = 1e-3) -> float:
    """Max of ``|Delta U + (1-2s)/y U_y + U_yy|`` over a ``(tau, y)`` grid.

    The spherical Laplacian is applied spectrally; ``y`` derivatives use
    fourth-order centred differences with step ``dy``.

    Warns
    -----
    RuntimeWarning
        If the grid reaches below ``y = 0.05``, where the ``1/y``
        coefficient makes the difference quotients unreliable.
    """
    _check_s(s)
    y = np.asarray(y_grid, dtype=float).reshape(-1)
    if np.any(y - 2.0 * dy <= 0):
        raise DomainError("difference stencil leaves the half-space")
    if np.min(y) < 0.05:
        warnings.warn("PDE grid reaches below y = 0.05; finite differences may be too coarse", RuntimeWarning, stacklevel=2)
    offs = np.arange(-2, 3) * dy
    m = multipliers(c.dim, c.K, s, y[None, :] + offs[:, None])  # (K+1, 5, Ny)
    d1 = np.einsum("i,kij->kj", _D1, m) / dy
    d2 = np.einsum("i,kij->kj", _D2, m) / dy ** 2
    lam = eigenvalues(c.dim, c.K)[:, None]
    r = -lam * m[:, 2, :] + (1.0 - 2.0 * s) / y[None, :] * d1 + d2
    tau = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    worst = 0.0
    for j in range(y.size):
        vals = synthesize(c.scaled(r[:, j]), tau)
        worst = max(worst, float(np.max(np.abs(vals))))
    return worst


def neumann_problem_negative(f: ZonalCoeffs, s: float, y: float, spec: QuadratureSpec = EXTENSION_SPEC) -> ZonalCoeffs:
    """Extension of ``(-Delta)^(-s) f`` from the heat formula.

    ``U(., y) = (1/Gamma(s)) int_0^inf exp(-y^2/4t) exp(t Delta) f t^(s-1) dt``
    for mean-zero ``f``; ``y = 0`` gives ``(-Delta)^(-s) f`` itself.

    Raises
    ------
    MeanNotZeroError
        If ``a_0 != 0``.
    """
    _check_s(s)
    if abs(f.a[0]) > 0.0:
        raise MeanNotZeroError("negative powers need mean-zero input (a_0 = 0)")
    if y < 0:
        raise DomainError("height must be nonnegative")
    mult = np.zeros(f.K + 1)
    if f.K == 0:
        return f.scaled(mult)
    a = 0.25 * y * y
    lk = eigenvalues(f.dim, f.K)[1:]

    def g(t):
        with np.errstate(under="ignore"):
            return np.exp(-a / t[:, None] - np.outer(t, lk)) * (t ** (s - 1.0))[:, None]

    if a == 0.0:
        r = integrate_time(g, IntegrandMeta(s - 1.0, float(lk[0])), spec, check=False)
    else:
        lo, hi = _gauss_window(a, float(lk[0]))
        r = _log_time_integral(g, lo, max(hi, 2.0 * lo), spec)
    mult[1:] = np.atleast_1d(r.value) / math.gamma(s)
    return f.scaled(mult)
