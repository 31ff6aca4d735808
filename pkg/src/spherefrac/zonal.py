"""Zonal harmonic analysis on the sphere S^{n-1}, n >= 3.

A zonal function is stored by its coefficients against the zonal
harmonics ``Z_k(tau) = (1/omega) ((k + nu)/nu) C_k^nu(tau)``, so that
``u(y) = sum_k a_k Z_k(e . y)`` for a fixed pole ``e``.  Rotation
invariant kernels are stored as :class:`KernelProfile` objects and
integrated against zonal functions at the pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NonIntegrableError
from .quadrature import QuadratureSpec, QuadResult, gauss_gegenbauer, tanh_sinh
from .specfun import gegenbauer_all, gegenbauer_at_one, gegenbauer_gap_all, surface_area

__all__ = [
    "SphereDim",
    "ZonalCoeffs",
    "NearModel",
    "KernelProfile",
    "eigenvalue",
    "eigenvalues",
    "dim_sh",
    "zonal_harmonic",
    "zonal_at_pole",
    "gegenbauer_norm",
    "project",
    "synthesize",
    "synthesize_drop",
    "funk_hecke_multiplier",
    "pole_integral",
    "constant_profile",
    "zonal_profile",
]


@dataclass(frozen=True)
class SphereDim:
    """Dimension data for the sphere ``S^{n-1}`` in ``R^n``.

    Parameters
    ----------
    n : int
        Ambient dimension, at least 3.
    """

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"sphere dimension n={self.n} must be an integer >= 3")

    @property
    def nu(self) -> float:
        return (self.n - 2) / 2.0

    @property
    def omega(self) -> float:
        """Surface area of ``S^{n-1}``."""
        return surface_area(self.n)

    @property
    def omega_sub(self) -> float:
        """Surface area of ``S^{n-2}``."""
        return surface_area(self.n - 1)


@dataclass(frozen=True)
class ZonalCoeffs:
    """Band-limited zonal function ``u = sum_k a_k Z_k``.

    Parameters
    ----------
    dim : SphereDim
    a : sequence of float
        Coefficients ``a_0 .. a_K``.  Stored as a read-only array.
    """

    dim: SphereDim
    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.a, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DomainError("ZonalCoeffs needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @property
    def K(self) -> int:
        return self.a.size - 1

    @property
    def mean_zero(self) -> bool:
        return self.a[0] == 0.0

    def with_coeffs(self, a) -> "ZonalCoeffs":
        return ZonalCoeffs(self.dim, a)

    def scaled(self, factors) -> "ZonalCoeffs":
        """Multiply coefficient ``a_k`` by ``factors[k]``."""
        return ZonalCoeffs(self.dim, self.a * np.asarray(factors, dtype=float))

    def pole_value(self) -> float:
        """``u(e) = sum_k a_k Z_k(1)``."""
        return float(np.dot(self.a, zonal_at_pole(self.dim, self.K)))

    @classmethod
    def one_hot(cls, dim: SphereDim, k: int, value: float = 1.0) -> "ZonalCoeffs":
        a = np.zeros(k + 1)
        a[k] = value
        return cls(dim, a)

    @classmethod
    def constant(cls, dim: SphereDim, value: float = 1.0) -> "ZonalCoeffs":
        return cls(dim, [value * dim.omega])

    def to_json(self) -> dict:
        return {"n": self.dim.n, "basis": "zonal-harmonic", "coeffs": [float(x) for x in self.a]}

    @classmethod
    def from_json(cls, obj: dict) -> "ZonalCoeffs":
        if not isinstance(obj, dict):
            raise DomainError("coefficient document must be a JSON object")
        if obj.get("basis") != "zonal-harmonic":
            raise DomainError("coefficient document must have basis 'zonal-harmonic'")
        try:
            n = int(obj["n"])
            coeffs = [float(x) for x in obj["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed coefficient document: {exc}") from None
        return cls(SphereDim(n), coeffs)


def eigenvalue(dim: SphereDim, k: int) -> float:
    """Laplace-Beltrami eigenvalue ``lambda_k = k (k + n - 2)``."""
    if k < 0:
        raise DomainError("degree must be nonnegative")
    return float(k * (k + dim.n - 2))


def eigenvalues(dim: SphereDim, K: int) -> np.ndarray:
    k = np.arange(K + 1, dtype=float)
    return k * (k + dim.n - 2)


def dim_sh(dim: SphereDim, k: int) -> int:
    """Dimension ``d_k`` of the degree-``k`` spherical harmonics."""
    if k < 0:
        raise DomainError("degree must be nonnegative")
    n = dim.n
    val = Fraction(2 * k + n - 2) * Fraction(math.factorial(k + n - 3), math.factorial(k) * math.factorial(n - 2))
    return int(val)


def zonal_harmonic(dim: SphereDim, k: int, tau):
    """Zonal harmonic ``Z_k(tau)``."""
    nu = dim.nu
    c = gegenbauer_all(k, nu, tau)[k]
    out = (k + nu) / nu * c / dim.omega
    return float(out) if np.ndim(tau) == 0 else out


def _zonal_factors(dim: SphereDim, K: int) -> np.ndarray:
    k = np.arange(K + 1)
    return (k + dim.nu) / dim.nu / dim.omega


def zonal_at_pole(dim: SphereDim, K: int) -> np.ndarray:
    """``Z_k(1) = d_k / omega`` for ``k = 0..K``."""
    c1 = np.array([gegenbauer_at_one(k, dim.nu) for k in range(K + 1)])
    return _zonal_factors(dim, K) * c1


def gegenbauer_norm(k: int, nu: float) -> float:
    """Squared norm ``h_k`` of ``C_k^nu`` for the weight ``(1 - tau^2)^(nu - 1/2)``."""
    logv = (
        math.log(math.pi)
        + (1.0 - 2.0 * nu) * math.log(2.0)
        + math.lgamma(k + 2.0 * nu)
        - math.log(k + nu)
        - 2.0 * math.lgamma(nu)
        - math.lgamma(k + 1.0)
    )
    return math.exp(logv)


def project(g, dim: SphereDim, K: int, nodes: Optional[int] = None) -> ZonalCoeffs:
    """Zonal coefficients ``a_0..a_K`` of a zonal function.

    Parameters
    ----------
    g : callable or array_like
        Either a vectorized function of ``tau`` or its samples on the
        ``nodes``-point Gauss rule returned by
        :func:`spherefrac.quadrature.gauss_gegenbauer` with ``nu = dim.nu``.
    dim : SphereDim
    K : int
        Highest degree to extract.
    nodes : int, optional
        Quadrature size, default ``K + 33``.

    Returns
    -------
    ZonalCoeffs

    Notes
    -----
    ``a_k = (omega nu / (k + nu)) / h_k * int g C_k^nu w dtau`` with the
    Funk-Hecke weight ``w = (1 - tau^2)^((n-3)/2)``.  The Gauss rule has the
    weight built in, so band-limited inputs are recovered exactly.
    """
    if K < 0:
        raise DomainError("K must be nonnegative")
    if callable(g):
        nodes = nodes or (K + 33)
    else:
        samples = np.asarray(g, dtype=float)
        if nodes is None:
            nodes = samples.size
        if samples.size != nodes:
            raise DomainError("sample count must equal the number of quadrature nodes")
    if nodes < K + 1:
        raise DomainError(f"need at least K+1={K + 1} nodes, got {nodes}")
    x, w = gauss_gegenbauer(nodes, dim.nu)
    vals = np.asarray(g(x), dtype=float) if callable(g) else samples
    C = gegenbauer_all(K, dim.nu, x)
    moments = C @ (w * vals)
    nu = dim.nu
    a = np.array([dim.omega * nu / (k + nu) / gegenbauer_norm(k, nu) * moments[k] for k in range(K + 1)])
    return ZonalCoeffs(dim, a)


def synthesize(c: ZonalCoeffs, tau):
    """Evaluate ``sum_k a_k Z_k(tau)``."""
    C = gegenbauer_all(c.K, c.dim.nu, tau)
    f = _zonal_factors(c.dim, c.K) * c.a
    out = np.tensordot(f, C, axes=1)
    return float(out) if np.ndim(tau) == 0 else out


def synthesize_drop(c: ZonalCoeffs, gap):
    """Evaluate ``u(1) - u(1 - gap)`` without cancellation for small ``gap``."""
    D = gegenbauer_gap_all(c.K, c.dim.nu, gap)
    f = _zonal_factors(c.dim, c.K) * c.a
    out = np.tensordot(f, D, axes=1)
    return float(out) if np.ndim(gap) == 0 else out


@dataclass(frozen=True)
class NearModel:
    """Model ``coeff * d^(-power) + sum_j beta_j d^(q_j)`` of a kernel near ``d = 0``.

    ``coeff`` is the analytic leading constant; the ``beta_j`` are fitted
    from kernel values at a few distances just above the cutoff.
    """

    coeff: float
    power: float
    corrections: tuple = (0.0,)


@dataclass(frozen=True)
class KernelProfile:
    """Rotation invariant kernel ``F(x . y)``.

    Parameters
    ----------
    dim : SphereDim
    gap_eval : callable
        Vectorized ``F`` as a function of ``gap = 1 - tau``.  Working in the
        gap keeps precision near the diagonal.
    singularity : float
        ``p`` with ``F ~ c d^(-p)`` as the geodesic distance ``d -> 0``.
    label : str
        One of ``Kpos``, ``Kneg``, ``L2s``, ``Ss``, ``Heat``, ``Poisson`` or a
        free-form name.
    params : dict
        Parameters echoed in reports.
    near : NearModel, optional
        Required when ``singularity > 0``.
    d_min : float
        Distance below which :func:`pole_integral` switches to ``near``.
    """

    dim: SphereDim
    gap_eval: Callable
    singularity: float = 0.0
    label: str = "custom"
    params: dict = field(default_factory=dict)
    near: Optional[NearModel] = None
    d_min: float = 1e-2

    def __call__(self, tau):
        return self.eval(tau)

    def eval(self, tau):
        tau = np.asarray(tau, dtype=float)
        out = self.gap_eval(1.0 - tau)
        return float(out) if np.ndim(out) == 0 else out

    def at_distance(self, d):
        """Kernel value at geodesic distance ``d``."""
        d = np.asarray(d, dtype=float)
        gap = 2.0 * np.sin(0.5 * d) ** 2
        out = self.gap_eval(gap)
        return float(out) if np.ndim(out) == 0 else out


def constant_profile(dim: SphereDim, value: float) -> KernelProfile:
    return KernelProfile(dim, lambda g: np.full(np.shape(g), value), 0.0, "constant", {"value": value})


def zonal_profile(dim: SphereDim, j: int) -> KernelProfile:
    """The zonal harmonic ``Z_j`` as a kernel profile."""
    return KernelProfile(dim, lambda g: zonal_harmonic(dim, j, 1.0 - np.asarray(g)), 0.0, "zonal", {"k": j})


def _fit_near(profile: KernelProfile, spec: QuadratureSpec):
    model = profile.near
    q = []
    for e in model.corrections:
        if all(abs(e - x) > 1e-9 for x in q) and abs(e + model.power) > 1e-9:
            q.append(float(e))
    d0 = profile.d_min
    ds = d0 * (1.0 + np.arange(len(q)) * 0.5)
    vals = np.asarray(profile.at_distance(ds), dtype=float)
    resid = vals - model.coeff * ds ** (-model.power)
    A = np.array([[d ** e for e in q] for d in ds])
    beta = np.linalg.solve(A, resid) if q else np.zeros(0)
    return q, beta


def _mul(kernel, weight):
    kernel = np.asarray(kernel, dtype=float)
    weight = np.asarray(weight, dtype=float)
    if weight.ndim > kernel.ndim:
        kernel = kernel.reshape(kernel.shape + (1,) * (weight.ndim - kernel.ndim))
    return kernel * weight


def _sin_ratio(d, m):
    # (sin d / d)^m, exact at d = 0.
    r = np.where(d > 0, np.sin(d) / np.where(d > 0, d, 1.0), 1.0)
    return r ** m


def pole_integral(
    profile: KernelProfile,
    weight: Callable,
    spec: QuadratureSpec = QuadratureSpec(),
    *,
    weight_order: float = 0.0,
) -> QuadResult:
    """Spherical convolution of a kernel with a zonal weight, at the pole.

    Computes ``omega_{n-2} int_{-1}^{1} F(tau) G(tau) (1 - tau^2)^((n-3)/2) dtau``
    in the geodesic variable ``d = arccos(tau)``, where the weight becomes
    ``sin(d)^(n-2)``.

    Parameters
    ----------
    profile : KernelProfile
    weight : callable
        ``G`` as a vectorized function of the gap ``1 - tau``.
    weight_order : float
        Known vanishing order of ``G`` at ``d = 0`` (2 for a subtracted
        weight ``g(1) - g(tau)``).

    Notes
    -----
    On ``[d_min, pi]`` the kernel itself is integrated.  On ``[0, d_min]``
    the kernel is replaced by its near-diagonal model, whose leading
    coefficient is analytic and whose correction terms are fitted to
    kernel values just above ``d_min``.
    """
    n = profile.dim.n
    p = profile.singularity
    if p - weight_order >= n - 1:
        raise NonIntegrableError(f"profile with singularity {p} is not integrable on S^{n - 1}")
    osub = profile.dim.omega_sub

    def gap_of(d):
        return 2.0 * np.sin(0.5 * d) ** 2

    opts = dict(abs_tol=spec.abs_tol, rel_tol=spec.rel_tol, max_levels=spec.max_levels)

    if profile.near is None or p <= 0:
        if p > 0:
            raise DomainError("singular profile needs a near-diagonal model")

        def full(d):
            g = gap_of(d)
            return _mul(profile.gap_eval(g) * np.sin(d) ** (n - 2), weight(g))

        r = tanh_sinh(full, 0.0, math.pi, **opts)
        return QuadResult(osub * r.value, osub * r.error)

    d0 = profile.d_min

    def far(d):
        g = gap_of(d)
        return _mul(profile.gap_eval(g) * np.sin(d) ** (n - 2), weight(g))

    rf = tanh_sinh(far, d0, math.pi, **opts)

    q, beta = _fit_near(profile, spec)
    model = profile.near
    exps = [-model.power] + q
    coefs = [model.coeff] + list(beta)

    def near(d):
        g = gap_of(d)
        ker = sum(c * d ** (e + n - 2) for c, e in zip(coefs, exps))
        return _mul(ker * _sin_ratio(d, n - 2), weight(g))

    alpha = n - 2 - p + weight_order
    rn = tanh_sinh(near, 0.0, d0, alpha_a=alpha, pass_offset=True, **opts)
    return QuadResult(osub * (rf.value + rn.value), osub * (rf.error + rn.error))


def funk_hecke_multiplier(F: KernelProfile, k: int, spec: QuadratureSpec = QuadratureSpec(), nodes: int = 256) -> float:
    """Eigenvalue of spherical convolution with ``F`` on degree-``k`` harmonics.

    ``m_k = (omega_{n-2} / C_k(1)) int F(tau) C_k(tau) (1 - tau^2)^((n-3)/2) dtau``.

    Bounded profiles use a Gauss-Gegenbauer rule and are checked against
    a rule of twice the size; singular profiles go through
    :func:`pole_integral`.

    Raises
    ------
    NonIntegrableError
        If ``F.singularity >= n - 1``.
    """
    dim = F.dim
    if F.singularity >= dim.n - 1:
        raise NonIntegrableError(f"profile singularity {F.singularity} >= n-1 is not integrable")
    c1 = gegenbauer_at_one(k, dim.nu)
    if F.singularity <= 0 and F.near is None:
        vals = []
        for m in (nodes, 2 * nodes):
            x, w = gauss_gegenbauer(m, dim.nu)
            Ck = gegenbauer_all(k, dim.nu, x)[k]
            vals.append(dim.omega_sub * np.dot(w, F.eval(x) * Ck) / c1)
        # Peaked profiles (small t, r near 1) stall the Gauss rule near 1e-11;
        # the distance-variable route then takes over.
        if abs(vals[1] - vals[0]) > max(spec.abs_tol, spec.rel_tol * abs(vals[1])):
            r = pole_integral(F, lambda g: gegenbauer_all(k, dim.nu, 1.0 - g)[k], spec)
            return r.value / c1
        return float(vals[1])
    r = pole_integral(F, lambda g: gegenbauer_all(k, dim.nu, 1.0 - g)[k], spec)
    return r.value / c1
