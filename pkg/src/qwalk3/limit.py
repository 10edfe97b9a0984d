"""
Closed-form long-time limits for the walk started at the origin.

Two limits are available.

* Pointwise: ``P(X_t = x)`` tends to a sub-probability measure that decays
  geometrically with ratio ``nu``.  Its total mass is ``Delta``.
* Rescaled: ``X_t / t`` converges in distribution to
  ``Delta * delta_0 + f`` with ``f`` supported on ``(-h, h)``,
  ``h = sqrt((1+c)/2)``.

The density has inverse-square-root singularities at ``+-h``.  Integrals of
``f`` use ``x = h sin u``, after which the integrand is smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from .core import CoinParameters, ProbabilityDistribution, SpinVector

__all__ = [
    "LOCALIZATION_TOL",
    "LimitConstants",
    "LimitDistribution",
    "nu",
    "ab_constants",
    "localization_indicator",
    "limit_constants",
    "limit_amplitude_origin",
    "limit_measure_origin",
    "localization_mass",
    "is_localized",
    "series_truncation",
    "support_half_width",
    "density_coefficients",
    "limit_density",
    "density_polynomial_minimum",
    "limit_distribution",
    "limit_cdf",
    "limit_moment",
    "two_state_correspondence_density",
    "rescaled_grid",
    "empirical_rescaled_cdf",
    "empirical_moment",
    "kolmogorov_distance",
]

LOCALIZATION_TOL = 1e-12
_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=200)


@dataclass(frozen=True)
class LimitConstants:
    nu: float
    a_const: complex
    b_const: complex
    delta_mass: float
    d0: float
    d1: float
    d2: float


def nu(params: CoinParameters) -> float:
    """Geometric decay ratio of the limit amplitudes, always in (-1, 0)."""
    c = params.c
    return (-(3.0 - c) + 2.0 * math.sqrt(2.0 * (1.0 - c))) / (1.0 + c)


def ab_constants(params: CoinParameters, spin: SpinVector) -> tuple[complex, complex]:
    """``A = 2(1-c) alpha + sqrt2 s beta`` and ``B = sqrt2 s beta + 2(1-c) gamma``."""
    c, s = params.c, params.s
    r = math.sqrt(2.0) * s * spin.beta
    return 2.0 * (1.0 - c) * spin.alpha + r, r + 2.0 * (1.0 - c) * spin.gamma


def localization_indicator(params: CoinParameters, spin: SpinVector) -> float:
    """``|A|^2 + |B|^2 + 2 nu Re(A conj(B))``; the walk localizes iff this is positive."""
    a, b = ab_constants(params, spin)
    return abs(a) ** 2 + abs(b) ** 2 + 2.0 * nu(params) * (a * b.conjugate()).real


def localization_mass(params: CoinParameters, spin: SpinVector) -> float:
    """Total mass ``Delta`` of the pointwise limit measure."""
    return localization_indicator(params, spin) / (8.0 * math.sqrt(2.0) * (1.0 - params.c) ** 1.5)


def is_localized(params: CoinParameters, spin: SpinVector, tol: float = LOCALIZATION_TOL) -> bool:
    return localization_indicator(params, spin) > tol


def density_coefficients(params: CoinParameters, spin: SpinVector) -> tuple[float, float, float]:
    """Coefficients ``(d0, d1, d2)`` of the quadratic factor of ``f``."""
    c, s = params.c, params.s
    al, be, ga = spin.alpha, spin.beta, spin.gamma
    q = math.sqrt(2.0) * s / (1.0 + c)
    d0 = abs(al + ga) ** 2 + 2.0 * abs(be) ** 2
    d1 = 2.0 * (
        -abs(al - be) ** 2 + abs(ga - be) ** 2 - (2.0 - q) * ((al - ga) * be.conjugate()).real
    )
    d2 = (
        abs(al) ** 2 - 2.0 * abs(be) ** 2 + abs(ga) ** 2
        - 2.0 * (q * ((al + ga) * be.conjugate()).real + (3.0 - c) / (1.0 + c) * (al * ga.conjugate()).real)
    )
    return d0, d1, d2


def limit_constants(params: CoinParameters, spin: SpinVector) -> LimitConstants:
    a, b = ab_constants(params, spin)
    d0, d1, d2 = density_coefficients(params, spin)
    return LimitConstants(
        nu=nu(params),
        a_const=a,
        b_const=b,
        delta_mass=localization_mass(params, spin),
        d0=d0,
        d1=d1,
        d2=d2,
    )


def limit_amplitude_origin(params: CoinParameters, spin: SpinVector, x: int) -> NDArray[np.complex128]:
    """Asymptotic (non-decaying) part of ``psi_t(x)``; its squared norm is the limit measure."""
    c, s = params.c, params.s
    n = nu(params)
    a, b = ab_constants(params, spin)
    pre = (1.0 + c) / (8.0 * s * s * math.sqrt(2.0 * (1.0 - c)))
    return pre * np.array(
        [
            2.0 * (1.0 - c) * (b * n ** abs(x + 1) + a * n ** abs(x)),
            math.sqrt(2.0) * s * (b * n ** abs(x + 1) + (a + b) * n ** abs(x) + a * n ** abs(x - 1)),
            2.0 * (1.0 - c) * (b * n ** abs(x) + a * n ** abs(x - 1)),
        ]
    )


def limit_measure_origin(params: CoinParameters, spin: SpinVector, x: ArrayLike) -> float | NDArray[np.float64]:
    """``lim P(X_t = x)`` for integer ``x`` (scalar or array)."""
    c = params.c
    n = nu(params)
    a, b = ab_constants(params, spin)
    xs = np.asarray(x)
    if not np.issubdtype(xs.dtype, np.integer):
        raise TypeError("positions must be integers")
    ax, axp, axm = np.abs(xs), np.abs(xs + 1), np.abs(xs - 1)
    t1 = np.abs(b * n**axp + a * n**ax) ** 2
    # grouped so that swapping A and B with x -> -x reproduces every rounding step
    t2 = np.abs((b * n**axp + a * n**axm) + (a + b) * n**ax) ** 2
    t3 = np.abs(b * n**ax + a * n**axm) ** 2
    out = ((1.0 + c) * t2 + 2.0 * (1.0 - c) * (t1 + t3)) / (64.0 * (1.0 - c) ** 2)
    return float(out) if out.ndim == 0 else out


def series_truncation(params: CoinParameters, threshold: float = 1e-16) -> int:
    """Smallest ``R`` with ``nu^(2R) < threshold``, padded by one site."""
    r = math.log(threshold) / (2.0 * math.log(abs(nu(params))))
    return int(math.ceil(r)) + 1


def support_half_width(params: CoinParameters) -> float:
    return math.sqrt((1.0 + params.c) / 2.0)


def limit_density(params: CoinParameters, spin: SpinVector, x: ArrayLike) -> float | NDArray[np.float64]:
    """Continuous part ``f(x)`` of the rescaled limit; zero outside ``(-h, h)``."""
    c = params.c
    d0, d1, d2 = density_coefficients(params, spin)
    h = support_half_width(params)
    xs = np.asarray(x, dtype=float)
    inside = np.abs(xs) < h
    xi = np.where(inside, xs, 0.0)
    val = math.sqrt(1.0 - c) * (d0 + d1 * xi + d2 * xi * xi) / (
        2.0 * math.pi * (1.0 - xi * xi) * np.sqrt(1.0 + c - 2.0 * xi * xi)
    )
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def density_polynomial_minimum(params: CoinParameters, spin: SpinVector) -> float:
    """Minimum of ``d0 + d1 x + d2 x^2`` over ``[-h, h]``; negative means ``f`` is not a density."""
    d0, d1, d2 = density_coefficients(params, spin)
    h = support_half_width(params)
    cands = [-h, h]
    if d2 != 0.0 and abs(d1 / (2.0 * d2)) < h:
        cands.append(-d1 / (2.0 * d2))
    return min(d0 + d1 * x + d2 * x * x for x in cands)


def _substituted_density(params: CoinParameters, spin: SpinVector) -> Callable[[float], float]:
    # f(h sin u) h cos u with the sqrt singularity cancelled analytically
    c = params.c
    d0, d1, d2 = density_coefficients(params, spin)
    h = support_half_width(params)
    pre = math.sqrt(1.0 - c) / (2.0 * math.sqrt(2.0) * math.pi)

    def g(u: float) -> float:
        x = h * math.sin(u)
        return pre * (d0 + d1 * x + d2 * x * x) / (1.0 - x * x)

    return g


@dataclass(frozen=True)
class LimitDistribution:
    """``Delta`` at the origin plus the density ``f`` on ``(-h, h)``."""

    params: CoinParameters
    spin: SpinVector
    atom_mass: float
    support_half_width: float
    atom_position: int = 0

    def density(self, x: ArrayLike) -> float | NDArray[np.float64]:
        return limit_density(self.params, self.spin, x)

    def _u(self, x: float) -> float:
        return math.asin(max(-1.0, min(1.0, x / self.support_half_width)))

    def continuous_mass(self, lo: float = -math.inf, hi: float = math.inf) -> float:
        """``integral of f`` over ``[lo, hi]``."""
        ua = self._u(lo) if math.isfinite(lo) else -math.pi / 2
        ub = self._u(hi) if math.isfinite(hi) else math.pi / 2
        if ub <= ua:
            return 0.0
        g = _substituted_density(self.params, self.spin)
        return integrate.quad(g, ua, ub, **_QUAD_OPTS)[0]

    def cdf(self, x: ArrayLike) -> float | NDArray[np.float64]:
        """``P(Y <= x)``; right-continuous, with the atom counted from ``x = 0`` on."""
        xs = np.asarray(x, dtype=float)
        flat = xs.ravel()
        order = np.argsort(flat, kind="stable")
        out = np.empty_like(flat)
        g = _substituted_density(self.params, self.spin)
        acc, u_prev = 0.0, -math.pi / 2
        for i in order:
            u = self._u(flat[i]) if math.isfinite(flat[i]) else math.copysign(math.pi / 2, flat[i])
            if u > u_prev:
                acc += integrate.quad(g, u_prev, u, **_QUAD_OPTS)[0]
                u_prev = u
            out[i] = acc + (self.atom_mass if flat[i] >= 0.0 else 0.0)
        out = out.reshape(xs.shape)
        return float(out) if out.ndim == 0 else out

    def moment(self, r: int) -> float:
        """``E[Y^r] = 0^r Delta + integral x^r f(x) dx``."""
        if r < 0:
            raise ValueError("moment order must be non-negative")
        g = _substituted_density(self.params, self.spin)
        h = self.support_half_width
        cont = integrate.quad(lambda u: (h * math.sin(u)) ** r * g(u), -math.pi / 2, math.pi / 2, **_QUAD_OPTS)[0]
        return cont + (self.atom_mass if r == 0 else 0.0)


def limit_distribution(params: CoinParameters, spin: SpinVector) -> LimitDistribution:
    return LimitDistribution(
        params=params,
        spin=spin,
        atom_mass=localization_mass(params, spin),
        support_half_width=support_half_width(params),
    )


def limit_cdf(params: CoinParameters, spin: SpinVector, x: ArrayLike) -> float | NDArray[np.float64]:
    return limit_distribution(params, spin).cdf(x)


def limit_moment(params: CoinParameters, spin: SpinVector, r: int) -> float:
    return limit_distribution(params, spin).moment(r)


def two_state_correspondence_density(params: CoinParameters, x: ArrayLike) -> float | NDArray[np.float64]:
    """Limit density shared with a 2-state walk whose coin has ``|a| = h``."""
    h2 = (1.0 + params.c) / 2.0
    xs = np.asarray(x, dtype=float)
    inside = xs * xs < h2
    xi = np.where(inside, xs, 0.0)
    val = math.sqrt(1.0 - h2) / (math.pi * (1.0 - xi * xi) * np.sqrt(h2 - xi * xi))
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


# --- finite-time comparison helpers ----------------------------------------


def rescaled_grid(points: int = 400, lo: float = -1.0, hi: float = 1.0) -> NDArray[np.float64]:
    """Cell-centred grid on ``[lo, hi]``.

    With an even number of points on ``[-1, 1]`` the grid never contains 0,
    where the limit CDF jumps.
    """
    if points < 1:
        raise ValueError("need at least one grid point")
    width = (hi - lo) / points
    return lo + width * (np.arange(points) + 0.5)


def empirical_rescaled_cdf(dist: ProbabilityDistribution, t: int, y: ArrayLike) -> NDArray[np.float64]:
    """``P(X_t / t <= y)`` read off a finite-time distribution."""
    if t < 1:
        raise ValueError("rescaling needs t >= 1")
    cum = np.cumsum(dist.masses)
    ys = np.asarray(y, dtype=float)
    # number of lattice sites x with x <= y t
    idx = np.floor(ys * t + 1e-9).astype(np.int64) - dist.support_lo
    out = np.where(idx < 0, 0.0, cum[np.clip(idx, 0, len(cum) - 1)])
    return out


def empirical_moment(dist: ProbabilityDistribution, t: int, r: int) -> float:
    y = dist.positions / float(t)
    return float(np.sum(dist.masses * y**r))


def kolmogorov_distance(
    dist: ProbabilityDistribution,
    t: int,
    params: CoinParameters,
    spin: SpinVector,
    grid: ArrayLike | None = None,
) -> float:
    """Largest gap between empirical and limit CDFs of ``X_t / t`` over ``grid``.

    The default grid is :func:`rescaled_grid`, which avoids the jump at 0.
    """
    ys = rescaled_grid() if grid is None else np.asarray(grid, dtype=float)
    emp = empirical_rescaled_cdf(dist, t, ys)
    lim = limit_cdf(params, spin, ys)
    return float(np.max(np.abs(emp - lim)))
