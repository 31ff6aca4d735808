"""Quadrature engines for angular integrals and semi-infinite time integrals.

Time integrals of the form ``int_0^inf f(t) dt`` are split at
``spec.split_point``.  The piece near zero uses the tanh-sinh
(double-exponential) rule, which tolerates integrable endpoint power
singularities.  The far piece is truncated at a point ``T`` read off the
declared exponential decay rate, or closed with an analytic tail when the
integrand decays only algebraically.

Integrands are vectorized: they receive a 1-D array of nodes of length
``N`` and return an array of shape ``(N,)`` or ``(N, ...)``.  In the second
case one call integrates a whole batch of related integrands on shared
nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.special import roots_gegenbauer

from .errors import DomainError, ToleranceError

__all__ = [
    "QuadratureSpec",
    "IntegrandMeta",
    "QuadResult",
    "gauss_legendre",
    "gauss_gegenbauer",
    "tanh_sinh",
    "integrate_time",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and refinement contract for every integral in the package.

    Parameters
    ----------
    abs_tol, rel_tol : float
        A result is accepted when the error estimate is below
        ``max(abs_tol, rel_tol * |value|)``.
    max_levels : int
        Number of step halvings allowed in the tanh-sinh rule.
    split_point : float
        Boundary between the near and far parts of a time integral.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-11
    max_levels: int = 10
    split_point: float = 1.0

    def __post_init__(self):
        if not (0 < self.abs_tol < 1 and 0 < self.rel_tol < 1):
            raise DomainError("abs_tol and rel_tol must lie in (0, 1)")
        if not (1 <= self.max_levels <= 14):
            raise DomainError("max_levels must lie in [1, 14]")
        if self.split_point <= 0:
            raise DomainError("split_point must be positive")

    def scaled(self, factor: float) -> "QuadratureSpec":
        """Copy with both tolerances multiplied by ``factor``."""
        return QuadratureSpec(
            abs_tol=min(self.abs_tol * factor, 0.5),
            rel_tol=min(self.rel_tol * factor, 0.5),
            max_levels=self.max_levels,
            split_point=self.split_point,
        )


@dataclass(frozen=True)
class IntegrandMeta:
    """What the integrator needs to know about a time integrand.

    Parameters
    ----------
    singular_exponent_at_zero : float
        ``alpha > -1`` with ``f(t) ~ t**alpha`` as ``t -> 0+``.
    decay_rate : float
        ``beta > 0`` with ``f(t) = O(exp(-beta t))``.
    tail : callable, optional
        ``tail(T)`` returns ``int_T^inf f(t) dt`` in closed form.  Used for
        integrands that decay only algebraically; the numerical part then
        stops at ``tail_start``.
    tail_start : float, optional
        Truncation point used together with ``tail``.
    """

    singular_exponent_at_zero: float = 0.0
    decay_rate: float = 1.0
    tail: Optional[Callable[[float], object]] = None
    tail_start: Optional[float] = None

    def __post_init__(self):
        if self.singular_exponent_at_zero <= -1:
            raise DomainError("singular exponent at zero must exceed -1")
        if self.decay_rate <= 0:
            raise DomainError("decay rate must be positive")
        if (self.tail is None) != (self.tail_start is None):
            raise DomainError("tail and tail_start must be given together")


class QuadResult(NamedTuple):
    """Integral value with an error estimate (scalars or matching arrays)."""

    value: object
    error: object


@lru_cache(maxsize=64)
def _gl_cached(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on ``[-1, 1]``.

    Parameters
    ----------
    n : int
        Number of nodes, ``1 <= n <= 512``.

    Returns
    -------
    nodes, weights : ndarray
        Read-only arrays of length ``n``.
    """
    if not (1 <= n <= 512):
        raise DomainError("gauss_legendre supports 1 <= n <= 512")
    return _gl_cached(int(n))


@lru_cache(maxsize=64)
def _gg_cached(n: int, nu: float):
    x, w = roots_gegenbauer(n, nu)
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_gegenbauer(n: int, nu: float):
    """Gauss rule for the weight ``(1 - tau^2)^(nu - 1/2)`` on ``[-1, 1]``.

    With ``nu = (n_dim - 2)/2`` this is exactly the Funk-Hecke weight
    ``(1 - tau^2)^((n_dim - 3)/2)``, so polynomial integrands are
    integrated exactly even when the weight has a square-root endpoint.
    """
    if not (1 <= n <= 2048):
        raise DomainError("gauss_gegenbauer supports 1 <= n <= 2048")
    return _gg_cached(int(n), float(nu))


def _endpoint_gap(length: float, alpha: float, tol: float) -> float:
    # Distance from a singular endpoint below which the integral of
    # t**alpha is negligible against tol.
    gap = (1e-3 * tol * (alpha + 1.0)) ** (1.0 / (alpha + 1.0))
    return max(min(gap, 1e-16 * length), 1e-300)


def _x_extent(length: float, gap: float) -> float:
    y = 0.5 * math.log(length / gap)
    return math.asinh(2.0 * y / math.pi)


def _node_block(a: float, b: float, x: np.ndarray):
    length = b - a
    y = 0.5 * math.pi * np.sinh(x)
    e = np.exp(-2.0 * np.abs(y))
    # Distance to the nearer endpoint, computed without cancellation.
    near = length * e / (1.0 + e)
    t = np.where(y <= 0, a + near, b - near)
    dist_a = np.where(y <= 0, near, length - near)
    w = length * 0.5 * math.pi * np.cosh(x) * 2.0 * e / (1.0 + e) ** 2
    w = np.where(near > 1e-300, w, 0.0)
    return t, dist_a, w


def tanh_sinh(
    f: Callable,
    a: float,
    b: float,
    *,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-11,
    max_levels: int = 10,
    alpha_a: float = 0.0,
    alpha_b: float = 0.0,
    min_level: int = 3,
    pass_offset: bool = False,
) -> QuadResult:
    """Adaptive tanh-sinh quadrature on ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorized integrand.
    a, b : float
        Finite interval with ``a < b``.
    alpha_a, alpha_b : float
        Power-law exponents of the integrand at the two endpoints, used to
        decide how far the node set reaches into each endpoint.
    pass_offset : bool
        If true, ``f`` receives the distance ``t - a`` instead of ``t``;
        this keeps full relative precision close to ``a``.

    Returns
    -------
    QuadResult
        The error estimate is the difference between the last two levels.

    Raises
    ------
    ToleranceError
        If ``max_levels`` halvings do not meet the tolerance.
    """
    if not b > a:
        raise DomainError("tanh_sinh needs a < b")
    length = b - a
    xa = _x_extent(length, _endpoint_gap(length, alpha_a, abs_tol))
    xb = _x_extent(length, _endpoint_gap(length, alpha_b, abs_tol))

    def block_sum(xs):
        t, da, w = _node_block(a, b, xs)
        keep = w > 0
        if not np.any(keep):
            return 0.0
        arg = da[keep] if pass_offset else t[keep]
        vals = np.asarray(f(arg), dtype=float)
        ww = w[keep].reshape((-1,) + (1,) * (vals.ndim - 1))
        return np.sum(vals * ww, axis=0)

    # Level 0 uses unit spacing; each further level adds the odd midpoints.
    acc = block_sum(np.arange(-math.ceil(xa), math.ceil(xb) + 1, dtype=float))
    prev = acc * 1.0
    best = prev
    err = np.inf
    for level in range(1, max_levels + 1):
        h = 2.0 ** -level
        ja = math.ceil(xa / h)
        jb = math.ceil(xb / h)
        j = np.arange(-ja, jb + 1)
        j = j[j % 2 != 0]
        acc = acc + block_sum(j * h)
        best = acc * h
        err = np.abs(best - prev)
        prev = best
        if level >= min_level:
            bound = np.maximum(abs_tol, rel_tol * np.abs(best))
            if np.all(err <= bound):
                return QuadResult(_squeeze(best), _squeeze(err))
    raise ToleranceError(
        f"tanh-sinh did not converge in {max_levels} levels (error {np.max(err):.3g})",
        value=_squeeze(best),
        error=_squeeze(err),
    )


def _squeeze(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def _check_meta(f, meta: IntegrandMeta, split: float) -> None:
    alpha = meta.singular_exponent_at_zero
    t = np.array([1e-6, 1e-9]) * split
    with np.errstate(all="ignore"):
        vals = np.abs(np.asarray(f(t), dtype=float)).reshape(2, -1).max(axis=1)
    scaled = vals * t ** (-alpha)
    if np.all(np.isfinite(scaled)) and scaled[1] > 1e4 * max(scaled[0], 1e-300):
        raise DomainError("integrand is more singular at t=0 than its declared exponent")


def integrate_time(f: Callable, meta: IntegrandMeta, spec: QuadratureSpec = QuadratureSpec(), *, check: bool = True) -> QuadResult:
    """Integrate ``f`` over ``(0, inf)``.

    Parameters
    ----------
    f : callable
        Vectorized integrand.
    meta : IntegrandMeta
        Singular exponent at zero, exponential decay rate and optional
        closed-form tail.
    spec : QuadratureSpec
        Tolerances.

    Returns
    -------
    QuadResult

    Examples
    --------
    >>> r = integrate_time(lambda t: np.exp(-t), IntegrandMeta())
    >>> abs(r.value - 1.0) < 1e-12
    True
    """
    split = spec.split_point
    if check:
        _check_meta(f, meta, split)
    # Each half gets half of the absolute budget.
    opts = dict(abs_tol=0.5 * spec.abs_tol, rel_tol=spec.rel_tol, max_levels=spec.max_levels)
    near = tanh_sinh(f, 0.0, split, alpha_a=meta.singular_exponent_at_zero, **opts)
    if meta.tail is not None:
        T = max(split, float(meta.tail_start))
        if T > split:
            far = tanh_sinh(f, split, T, **opts)
            value = near.value + far.value
            error = near.error + far.error
        else:
            value, error = near.value, near.error
        value = value + np.asarray(meta.tail(T), dtype=float)
        return QuadResult(_squeeze(value), _squeeze(error))

    beta = meta.decay_rate
    probe = split * np.array([1.0, 2.0, 4.0])
    with np.errstate(all="ignore"):
        pv = np.abs(np.asarray(f(probe), dtype=float)).reshape(3, -1).max(axis=1)
    scale = float(np.max(pv * np.exp(beta * (probe - split))))
    if not np.isfinite(scale):
        raise DomainError("integrand is not finite on the far field")
    reach = math.log(max(scale / (beta * 1e-2 * spec.abs_tol), 1.0)) / beta if scale > 0 else 0.0
    if reach <= 0:
        return QuadResult(_squeeze(near.value), _squeeze(near.error))
    T = split + min(reach, 800.0 / beta)
    far = tanh_sinh(f, split, T, **opts)
    return QuadResult(_squeeze(near.value + far.value), _squeeze(near.error + far.error))
