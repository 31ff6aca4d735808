"""Poisson and heat semigroups on the sphere.

The Poisson semigroup ``exp(-tL)`` of the Dirichlet-to-Neumann map acts on
degree-``k`` harmonics by ``r^k`` with ``r = exp(-t)``; the heat semigroup
``exp(t Delta)`` acts by ``exp(-t lambda_k)``.  Both are available as
coefficient maps and as kernel profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import gegenbauer_all, gegenbauer_at_one
from .zonal import KernelProfile, SphereDim, ZonalCoeffs, eigenvalues

__all__ = [
    "PoissonParam",
    "HeatParam",
    "poisson_gap",
    "poisson_kernel",
    "poisson_apply",
    "poisson_profile",
    "heat_truncation",
    "heat_series",
    "heat_kernel",
    "heat_apply",
    "heat_profile",
    "poisson_lipschitz_check",
    "HEAT_T_MIN",
    "HEAT_K_CAP",
]

# Public heat kernel evaluation range.  Internal kernel routes allow a
# larger cap because they need W_t at distances down to about 1e-3.
HEAT_T_MIN = 1e-3
HEAT_K_CAP = 6000
ROUTE_K_CAP = 40000


@dataclass(frozen=True)
class PoissonParam:
    """Poisson kernel parameter ``r = exp(-t)`` in ``[0, 1)``."""

    r: float
    dim: SphereDim

    def __post_init__(self):
        if not (0.0 <= self.r < 1.0):
            raise DomainError(f"Poisson parameter r={self.r} must lie in [0, 1)")


@dataclass(frozen=True)
class HeatParam:
    """Heat kernel time ``t > 0`` with series truncation ``K``."""

    t: float
    dim: SphereDim
    tol: float = 1e-14

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError("heat time t must be positive")

    @property
    def K(self) -> int:
        return heat_truncation(self.dim, self.t, self.tol)


def poisson_gap(dim: SphereDim, r, gap):
    """Poisson kernel ``P_r`` as a function of ``gap = 1 - tau`` (broadcasts)."""
    r = np.asarray(r, dtype=float)
    gap = np.asarray(gap, dtype=float)
    den = (1.0 - r) ** 2 + 2.0 * r * gap
    return (1.0 - r) * (1.0 + r) / (dim.omega * den ** (0.5 * dim.n))


def poisson_kernel(p: PoissonParam, tau):
    """Poisson kernel ``P_r(tau) = (1 - r^2) / (omega (1 - 2 r tau + r^2)^(n/2))``.

    Examples
    --------
    >>> d = SphereDim(3)
    >>> round(poisson_kernel(PoissonParam(0.5, d), 1.0), 7)
    0.4774648
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(np.abs(tau) > 1.0):
        raise DomainError("tau must lie in [-1, 1]")
    out = poisson_gap(p.dim, p.r, 1.0 - tau)
    return float(out) if out.ndim == 0 else out


def poisson_apply(c: ZonalCoeffs, t: float) -> ZonalCoeffs:
    """Apply ``exp(-tL)``: ``a_k -> exp(-t k) a_k``."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    k = np.arange(c.K + 1)
    return c.scaled(np.exp(-t * k))


def poisson_profile(dim: SphereDim, r: float) -> KernelProfile:
    PoissonParam(r, dim)
    return KernelProfile(dim, lambda g: poisson_gap(dim, r, g), 0.0, "Poisson", {"r": r})


def heat_truncation(dim: SphereDim, t, tol: float = 1e-14):
    """Series length ``K(t)`` for the heat kernel.

    Smallest ``K`` whose term bound ``exp(-t lambda_K) ((K+nu)/nu) C_K(1)``
    times the geometric tail factor falls below ``tol * omega``.  Accepts an
    array of times.
    """
    t = np.asarray(t, dtype=float)
    n = dim.n
    L = math.log(1.0 / (tol * dim.omega))
    K = np.sqrt(L / t) + 2.0
    for _ in range(3):
        # log of the term bound; C_K(1) <= (K + 2 nu)^(2 nu - 1) / Gamma(2 nu).
        logpoly = (n - 2) * np.log(K + n) + math.log(2.0)
        ratio = np.exp(-t * (2.0 * K + n - 1.0))
        tail = -np.log1p(-np.minimum(ratio, 1.0 - 1e-12))
        K = np.sqrt(np.maximum((L + logpoly + tail) / t, 0.0)) + 2.0
    K = np.ceil(K).astype(int)
    return int(K) if K.ndim == 0 else K


def heat_series(dim: SphereDim, t, gap, *, drop_mean=False, k_cap: int = ROUTE_K_CAP, tol: float = 1e-14):
    """Heat kernel matrix ``W_t(1 - gap)`` for arrays ``t`` and ``gap``.

    Parameters
    ----------
    t : array_like, shape (Nt,)
    gap : array_like, shape (Ng,)
    drop_mean : bool or array of bool
        Per time, omit the ``k = 0`` term ``1/omega``; used for large times
        where ``W_t - 1/omega`` is needed without cancellation.
    k_cap : int
        Largest series length allowed.

    Returns
    -------
    ndarray, shape (Nt, Ng)

    Notes
    -----
    Entries whose Gaussian factor ``exp(-d^2 / 4t)`` is below ``exp(-40)``
    are set to zero; the series cannot resolve them and they do not
    contribute to any time integral.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    gap = np.atleast_1d(np.asarray(gap, dtype=float))
    drop = np.broadcast_to(np.asarray(drop_mean, dtype=bool), t.shape)
    d = 2.0 * np.arcsin(np.sqrt(np.clip(0.5 * gap, 0.0, 1.0)))
    out = np.zeros((t.size, gap.size))
    # Earliest time at which each distance is resolved.
    t_lo = d * d / 160.0
    live = t[:, None] >= t_lo[None, :]
    rows = np.nonzero(live.any(axis=1))[0]
    # Unresolved entries are W = 0, or -1/omega once the mean is dropped.
    dead = np.where(drop[:, None] & ~live, -1.0 / dim.omega, 0.0)
    if rows.size == 0:
        return dead
    Ks = heat_truncation(dim, t[rows], tol)
    if np.max(Ks) > k_cap:
        bad = t[rows][np.argmax(Ks)]
        raise DomainError(f"heat series at t={bad:.3g} needs more than {k_cap} terms")
    Kmax = int(np.max(Ks))
    nu = dim.nu
    kk = np.arange(Kmax + 1, dtype=float)
    lam = kk * (kk + dim.n - 2)
    scale = (kk + nu) / nu / dim.omega
    # Process columns in blocks so the Gegenbauer table stays small.
    block = max(1, int(4e6 // (Kmax + 1)))
    order = np.argsort(Ks)
    for c0 in range(0, gap.size, block):
        cols = slice(c0, min(gap.size, c0 + block))
        C = gegenbauer_all(Kmax, nu, 1.0 - gap[cols]) * scale[:, None]
        # Group times by required length to avoid wasted work.
        for chunk in np.array_split(order, max(1, order.size // 32)):
            if chunk.size == 0:
                continue
            r = rows[chunk]
            K = int(np.max(Ks[chunk]))
            E = np.exp(-np.outer(t[r], lam[: K + 1]))
            E[drop[r], 0] = 0.0
            out[r, cols] = E @ C[: K + 1]
    out[~live] = dead[~live]
    return out


def heat_kernel(h: HeatParam, tau, tol: float = 1e-14):
    """Heat kernel ``W_t(tau) = (1/omega) sum_k exp(-t lambda_k) ((k+nu)/nu) C_k(tau)``.

    Raises
    ------
    DomainError
        If ``t < HEAT_T_MIN`` or more than ``HEAT_K_CAP`` terms are needed.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(np.abs(tau) > 1.0):
        raise DomainError("tau must lie in [-1, 1]")
    if h.t < HEAT_T_MIN:
        raise DomainError(f"heat kernel needs t >= {HEAT_T_MIN:g}, got t={h.t:g}")
    K = heat_truncation(h.dim, h.t, tol)
    if K > HEAT_K_CAP:
        raise DomainError(f"heat kernel at t={h.t:g} needs {K} > {HEAT_K_CAP} terms")
    k = np.arange(K + 1, dtype=float)
    nu = h.dim.nu
    coef = np.exp(-h.t * k * (k + h.dim.n - 2)) * (k + nu) / nu / h.dim.omega
    C = gegenbauer_all(K, nu, tau)
    out = np.tensordot(coef, C, axes=1)
    return float(out) if np.ndim(out) == 0 else out


def heat_apply(c: ZonalCoeffs, t: float) -> ZonalCoeffs:
    """Apply ``exp(t Delta)``: ``a_k -> exp(-t lambda_k) a_k``."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    return c.scaled(np.exp(-t * eigenvalues(c.dim, c.K)))


def heat_profile(dim: SphereDim, t: float, tol: float = 1e-14) -> KernelProfile:
    h = HeatParam(t, dim, tol)
    return KernelProfile(dim, lambda g: heat_kernel(h, 1.0 - np.asarray(g), tol), 0.0, "Heat", {"t": t})


def poisson_lipschitz_check(c: ZonalCoeffs, samples: int = 2000) -> float:
    """Empirical constant ``sup_{0<t<1} |exp(-tL)u(e) - u(e)| / t`` at the pole."""
    t = np.geomspace(1e-8, 1.0, samples, endpoint=False)
    z1 = c.a * _zonal_one(c)
    k = np.arange(c.K + 1)
    # exp(-tk) - 1 via expm1 keeps the small-t quotient accurate.
    diff = np.expm1(-np.outer(t, k)) @ z1
    return float(np.max(np.abs(diff) / t))


def _zonal_one(c: ZonalCoeffs) -> np.ndarray:
    nu = c.dim.nu
    k = np.arange(c.K + 1)
    c1 = np.array([gegenbauer_at_one(j, nu) for j in k])
    return (k + nu) / nu * c1 / c.dim.omega
