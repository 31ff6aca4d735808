"""Fractional powers on the circle T = [0, 1).

Kernels of ``(-d^2/dx^2)^(-sigma/2)`` and ``(-d^2/dx^2)^(sigma/2)`` in
closed form through the Hurwitz zeta function, the Jacobi theta heat
kernel, and Fine's functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError
from .quadrature import IntegrandMeta, QuadratureSpec, integrate_time, tanh_sinh
from .specfun import hurwitz_zeta

__all__ = [
    "CircleKernelQuery",
    "circle_kernel_neg",
    "circle_kernel_pos",
    "circle_kernel_pos_heat",
    "circle_frac_cos",
    "theta_heat_kernel",
    "fine_f",
    "fine_H",
    "fine_H_zeta",
    "endpoint_exponent",
]

CIRCLE_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12, max_levels=11)


@dataclass(frozen=True)
class CircleKernelQuery:
    """Exponent ``sigma > 0`` and a point ``x`` in (0, 1)."""

    sigma: float
    x: object

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        x = np.asarray(self.x, dtype=float)
        if np.any(x <= 0) or np.any(x >= 1):
            raise DomainError("x must lie strictly between 0 and 1")


def _xs(q):
    return np.asarray(q.x, dtype=float)


def _out(v, q):
    return float(v) if np.ndim(q.x) == 0 else v


def _cos_half(sigma):
    c = math.cos(0.5 * math.pi * sigma)
    if abs(c) < 1e-14:
        raise PoleError(f"cos(pi sigma / 2) vanishes at sigma={sigma}")
    return c


def circle_kernel_neg(q: CircleKernelQuery):
    """Kernel ``K_{-sigma}(x) = [zeta(1-sigma, x) + zeta(1-sigma, 1-x)] / (2 Gamma(sigma) cos(pi sigma/2))``.

    Raises
    ------
    PoleError
        When ``cos(pi sigma / 2) = 0`` (odd integer ``sigma``).
    """
    c = _cos_half(q.sigma)
    x = _xs(q)
    z = hurwitz_zeta(1.0 - q.sigma, x) + hurwitz_zeta(1.0 - q.sigma, 1.0 - x)
    return _out(z / (2.0 * math.gamma(q.sigma) * c), q)


def circle_kernel_pos(q: CircleKernelQuery):
    """Kernel ``K_sigma(x) = [zeta(1+sigma, x) + zeta(1+sigma, 1-x)] / (2 Gamma(-sigma) cos(pi sigma/2))``.

    With this normalization
    ``(-d^2/dx^2)^(sigma/2) u(0) = int_0^1 (u(y) - u(0)) K_sigma(y) dy``.
    """
    if not (0.0 < q.sigma < 2.0):
        raise DomainError("positive powers need sigma in (0, 2)")
    if q.sigma == 1.0:
        raise PoleError("sigma = 1 is a pole of the closed form")
    c = _cos_half(q.sigma)
    x = _xs(q)
    z = hurwitz_zeta(1.0 + q.sigma, x) + hurwitz_zeta(1.0 + q.sigma, 1.0 - x)
    return _out(z / (2.0 * math.gamma(-q.sigma) * c), q)


_DUAL_M = np.arange(-8, 10, dtype=float)


def _theta_matrix(x, t, drop_mean=False):
    # W_t(x) on a (t, x) grid, shape (Nt, Nx).
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((t.size, x.size))
    small = 4.0 * math.pi ** 2 * t < 1.0
    if np.any(small):
        ts = t[small][:, None, None]
        diff = x[None, :, None] - _DUAL_M[None, None, :]
        g = np.exp(-diff * diff / (4.0 * ts)).sum(axis=2)
        vals = g / np.sqrt(4.0 * math.pi * ts[:, :, 0])
        if drop_mean:
            vals = vals - 1.0
        out[small] = vals
    if np.any(~small):
        tl = t[~small]
        k = np.arange(1, 12, dtype=float)
        e = np.exp(-4.0 * math.pi ** 2 * np.outer(tl, k * k))
        vals = 2.0 * e @ np.cos(2.0 * math.pi * np.outer(k, x))
        if not drop_mean:
            vals = vals + 1.0
        out[~small] = vals
    return out


def theta_heat_kernel(x, t: float, branch: str = "auto"):
    """Heat kernel of the circle ``W_t(x) = 1 + 2 sum_k exp(-4 pi^2 k^2 t) cos(2 pi k x)``.

    Parameters
    ----------
    x : float or array_like
    t : float
        Positive time.
    branch : {'auto', 'spectral', 'dual'}
        ``auto`` uses the Fourier series for ``4 pi^2 t >= 1`` and the
        Gaussian image sum ``(4 pi t)^(-1/2) sum_m exp(-(x-m)^2 / 4t)``
        otherwise.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    xx = np.asarray(x, dtype=float)
    if branch == "auto":
        out = _theta_matrix(xx.reshape(-1), [t])[0]
    elif branch == "spectral":
        kmax = int(math.ceil(math.sqrt(45.0 / (4.0 * math.pi ** 2 * t)))) + 2
        k = np.arange(1, kmax + 1, dtype=float)
        out = 1.0 + 2.0 * np.exp(-4.0 * math.pi ** 2 * k * k * t) @ np.cos(2.0 * math.pi * np.outer(k, xx.reshape(-1)))
    elif branch == "dual":
        mmax = int(math.ceil(math.sqrt(180.0 * t))) + 2
        m = np.arange(-mmax, mmax + 2, dtype=float)
        diff = xx.reshape(-1)[:, None] - m[None, :]
        out = np.exp(-diff * diff / (4.0 * t)).sum(axis=1) / math.sqrt(4.0 * math.pi * t)
    else:
        raise DomainError(f"unknown branch {branch!r}")
    out = out.reshape(xx.shape)
    return float(out) if out.ndim == 0 else out


def fine_f(x, t: float):
    """Fine's function ``f(x, t) = W_{t / 4 pi}(x)``."""
    return theta_heat_kernel(x, t / (4.0 * math.pi))


def _heat_mellin(x, a: float, spec: QuadratureSpec):
    """``int_0^1 W_t t^(a-1) dt + int_1^inf (W_t - 1) t^(a-1) dt`` for ``a < 0``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    split = spec.split_point

    def f(t):
        return _theta_matrix(xs, t, drop_mean=False) * np.where(t < split, 1.0, 0.0)[:, None] * (t ** (a - 1.0))[:, None] + (
            _theta_matrix(xs, t, drop_mean=True) * np.where(t >= split, 1.0, 0.0)[:, None] * (t ** (a - 1.0))[:, None]
        )

    r = integrate_time(f, IntegrandMeta(0.0, 4.0 * math.pi ** 2), spec, check=False)
    return np.atleast_1d(r.value)


def circle_kernel_pos_heat(q: CircleKernelQuery, spec: QuadratureSpec = CIRCLE_SPEC):
    """``K_sigma`` by heat subordination, ``(1/Gamma(-sigma/2)) int W_t(x) t^(-1-sigma/2) dt``.

    The constant mode is split off at ``t = 1``, where it integrates to
    ``2/sigma``.  Serves as an independent check of :func:`circle_kernel_pos`.
    """
    if not (0.0 < q.sigma < 2.0):
        raise DomainError("positive powers need sigma in (0, 2)")
    a = -0.5 * q.sigma
    split = spec.split_point
    val = _heat_mellin(_xs(q), a, spec) + split ** a / (-a)
    out = val / math.gamma(a)
    return float(out[0]) if np.ndim(q.x) == 0 else out


def fine_H(x, omega: float, spec: QuadratureSpec = CIRCLE_SPEC):
    """Fine's function ``H = F + G - 2/omega`` for ``omega < 0``.

    ``F = int_0^1 f(x,t) t^(omega/2-1) dt`` and
    ``G = int_1^inf (f(x,t) - 1) t^(omega/2-1) dt``.
    """
    if not omega < 0:
        raise DomainError("fine_H needs omega < 0")
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0) or np.any(xs >= 1):
        raise DomainError("x must lie in (0, 1)")
    a = 0.5 * omega
    # f(x,t) = W_{t/4pi}(x): substitute t = 4 pi u, with the split kept at t = 1.
    sub = QuadratureSpec(spec.abs_tol, spec.rel_tol, spec.max_levels, split_point=1.0 / (4.0 * math.pi))
    val = (4.0 * math.pi) ** a * _heat_mellin(xs.reshape(-1), a, sub) - 2.0 / omega
    out = val.reshape(xs.shape)
    return float(out) if out.ndim == 0 else out


def fine_H_zeta(x, omega: float):
    """Closed form ``Gamma((1-omega)/2) pi^(-(1-omega)/2) [zeta(1-omega, x) + zeta(1-omega, 1-x)]``."""
    b = 0.5 * (1.0 - omega)
    xs = np.asarray(x, dtype=float)
    out = math.gamma(b) * math.pi ** (-b) * (hurwitz_zeta(1.0 - omega, xs) + hurwitz_zeta(1.0 - omega, 1.0 - xs))
    return float(out) if np.ndim(out) == 0 else out


def circle_frac_cos(k: int, sigma: float, spec: QuadratureSpec = CIRCLE_SPEC) -> float:
    """``int_0^1 (cos(2 pi k y) - 1) K_sigma(y) dy``, which should equal ``(2 pi k)^sigma``.

    The kernel route for ``(-d^2/dx^2)^(sigma/2)`` applied to ``cos(2 pi k x)``
    at ``x = 0``.
    """
    if k < 1:
        raise DomainError("k must be positive")

    def f(y):
        ker = circle_kernel_pos(CircleKernelQuery(sigma, y))
        return -2.0 * np.sin(math.pi * k * y) ** 2 * ker

    # Symmetric about 1/2; the integrand behaves like y^(1 - sigma) at 0.
    r = tanh_sinh(f, 0.0, 0.5, alpha_a=1.0 - sigma, abs_tol=spec.abs_tol, rel_tol=spec.rel_tol, max_levels=spec.max_levels)
    return 2.0 * r.value


def endpoint_exponent(sigma: float, kind: str = "neg", x_lo: float = 1e-4, x_hi: float = 1e-2, points: int = 12, differenced: bool = True):
    """Least-squares exponent of the kernel near ``x = 0``.

    For ``kind='neg'`` the kernel is ``C x^(sigma-1) + O(1)``; with
    ``differenced=True`` the fit uses ``|K(x) - K(2x)|``, which removes
    the bounded part and leaves ``C (1 - 2^(sigma-1)) x^(sigma-1) + O(x)``.
    For ``kind='pos'`` the kernel itself is fitted against ``x^(-1-sigma)``.

    Returns
    -------
    float
        Fitted slope of ``log |.|`` against ``log x``.
    """
    x = np.geomspace(x_lo, x_hi, points)
    if kind == "neg":
        ker = lambda z: circle_kernel_neg(CircleKernelQuery(sigma, z))
        y = ker(x) - ker(2.0 * x) if differenced else ker(x)
    elif kind == "pos":
        y = circle_kernel_pos(CircleKernelQuery(sigma, x))
    else:
        raise DomainError(f"unknown kind {kind!r}")
    y = np.abs(y)
    if np.any(y == 0):
        raise DomainError("kernel vanishes on the fitting range")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)
