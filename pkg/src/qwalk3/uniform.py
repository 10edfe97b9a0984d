"""
Delocalized initial states and the discrete uniform limit measures they produce.

An envelope ``F`` on the integers defines the initial state

    psi_0(x) = {F(x-1)/2 + r F(x) + F(x+1)/2} phi,    r = (3-c)/(1+c),

and the limit of ``P(X_t = x)`` is a quadratic form in ``F`` near ``x``.
The comb envelope (``F = 1/sqrt(M(n))`` on even sites ``0..2n-2``) turns
that limit into a flat plateau for suitable spins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .core import CoinParameters, SpinVector, WalkState
from .limit import ab_constants

__all__ = [
    "NormalizationViolation",
    "EnvelopeFunction",
    "PlateauReport",
    "stencil_ratio",
    "comb_normalizer",
    "comb_envelope",
    "delocalized_initial_state",
    "limit_measure_delocalized",
    "lemma_limit_measure",
    "uniform_plateau_report",
    "example_spin",
    "example3_condition",
    "example3_spin_condition",
]

NORMALIZATION_TOL = 1e-10
_PLATEAU_RTOL = 1e-12


class NormalizationViolation(ValueError):
    """The envelope does not yield a unit-norm initial state for this coin."""


def stencil_ratio(params: CoinParameters) -> float:
    """Centre weight ``(3-c)/(1+c)`` of the three-point stencil."""
    return (3.0 - params.c) / (1.0 + params.c)


@dataclass(frozen=True)
class EnvelopeFunction:
    """Finitely supported ``F : Z -> C``, stored on ``[support_lo, support_hi]``."""

    support_lo: int
    values: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=complex).ravel()
        if v.size == 0:
            raise ValueError("envelope needs at least one value")
        v.setflags(write=False)
        object.__setattr__(self, "support_lo", int(self.support_lo))
        object.__setattr__(self, "values", v)

    @property
    def support_hi(self) -> int:
        return self.support_lo + self.values.size - 1

    def __call__(self, x: int) -> complex:
        if self.support_lo <= x <= self.support_hi:
            return complex(self.values[x - self.support_lo])
        return 0.0j

    def padded(self, lo: int, hi: int) -> NDArray[np.complex128]:
        out = np.zeros(hi - lo + 1, dtype=complex)
        a, b = max(lo, self.support_lo), min(hi, self.support_hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.values[a - self.support_lo : b - self.support_lo + 1]
        return out

    def stencil(self, params: CoinParameters) -> tuple[int, NDArray[np.complex128]]:
        """``F(x-1)/2 + r F(x) + F(x+1)/2`` on ``[lo-1, hi+1]``, with its first site."""
        lo, hi = self.support_lo - 1, self.support_hi + 1
        f = self.padded(lo - 1, hi + 1)
        return lo, 0.5 * f[:-2] + stencil_ratio(params) * f[1:-1] + 0.5 * f[2:]

    def normalization(self, params: CoinParameters) -> float:
        _, w = self.stencil(params)
        return float(np.sum(w.real**2 + w.imag**2))


@dataclass(frozen=True)
class PlateauReport:
    kind: str  # "2n-point uniform", "2n+1-point uniform" or "non-uniform"
    plateau: float
    support: tuple[int, int]
    total_mass: float
    masses: dict[int, float]

    @property
    def n_points(self) -> int:
        return sum(1 for v in self.masses.values() if v > 0.0)


def comb_normalizer(n: int, params: CoinParameters) -> float:
    """``M(n) = {1 + r^2} n - 1/2``."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    r = stencil_ratio(params)
    return (1.0 + r * r) * n - 0.5


def comb_envelope(n: int, params: CoinParameters) -> EnvelopeFunction:
    """``1/sqrt(M(n))`` on ``x = 0, 2, ..., 2n-2`` and zero elsewhere."""
    m = comb_normalizer(n, params)
    v = np.zeros(2 * n - 1, dtype=complex)
    v[::2] = 1.0 / math.sqrt(m)
    return EnvelopeFunction(0, v)


def delocalized_initial_state(env: EnvelopeFunction, params: CoinParameters, spin: SpinVector) -> WalkState:
    """Initial state ``stencil(F)(x) * phi``.

    Raises
    ------
    NormalizationViolation
        If the stencil's squared norm differs from 1 by more than ``1e-10``.
    """
    norm2 = env.normalization(params)
    if abs(norm2 - 1.0) > NORMALIZATION_TOL:
        raise NormalizationViolation(f"envelope gives norm^2 = {norm2!r} for c = {params.c!r}")
    lo, w = env.stencil(params)
    return WalkState(lo, w[:, None] * spin.as_array()[None, :])


def limit_measure_delocalized(
    env: EnvelopeFunction, params: CoinParameters, spin: SpinVector, x: int
) -> float:
    """``lim P(X_t = x)`` for the state built from ``env``.

    Sum of three squared terms in ``F(x-1), F(x), F(x+1)``.
    """
    c = params.c
    a, b = ab_constants(params, spin)
    fm, f0, fp = env(x - 1), env(x), env(x + 1)
    t1 = abs(a * f0 + b * fp) ** 2 / (1.0 + c)
    t2 = abs(a * fm + (a + b) * f0 + b * fp) ** 2 / (2.0 * (1.0 - c))
    t3 = abs(a * fm + b * f0) ** 2 / (1.0 + c)
    return (t1 + t2 + t3) / (4.0 * (1.0 + c))


def lemma_limit_measure(n: int, params: CoinParameters, spin: SpinVector, x: int) -> float:
    """Piecewise closed form of the limit measure for the comb envelope."""
    c, s = params.c, params.s
    m = comb_normalizer(n, params)
    a, b = ab_constants(params, spin)
    edge = (3.0 - c) / (8.0 * (1.0 + c) * s * s * m)
    if x == -1:
        return edge * abs(b) ** 2
    if x == 2 * n - 1:
        return edge * abs(a) ** 2
    if 0 <= x <= 2 * n - 2:
        return ((abs(a) ** 2 + abs(b) ** 2) / (1.0 + c) + abs(a + b) ** 2 / (2.0 * (1.0 - c))) / (
            4.0 * (1.0 + c) * m
        )
    return 0.0


def uniform_plateau_report(n: int, params: CoinParameters, spin: SpinVector) -> PlateauReport:
    """Classify the comb-envelope limit measure by how many equal masses it has."""
    masses = {x: lemma_limit_measure(n, params, spin, x) for x in range(-1, 2 * n)}
    total = math.fsum(masses.values())
    top = max(masses.values())
    positive = {x: v for x, v in masses.items() if v > _PLATEAU_RTOL * top} if top > 0.0 else {}
    kind, plateau = "non-uniform", 0.0
    if positive:
        lo_v, hi_v = min(positive.values()), max(positive.values())
        xs = sorted(positive)
        contiguous = xs == list(range(xs[0], xs[-1] + 1))
        if contiguous and hi_v - lo_v <= _PLATEAU_RTOL * hi_v:
            if len(xs) == 2 * n:
                kind = "2n-point uniform"
            elif len(xs) == 2 * n + 1:
                kind = "2n+1-point uniform"
            plateau = hi_v if kind != "non-uniform" else 0.0
    support = (min(positive), max(positive)) if positive else (0, -1)
    return PlateauReport(kind=kind, plateau=plateau, support=support, total_mass=total, masses=masses)


def example_spin(name: str) -> SpinVector:
    """Spins of the three worked configurations: ``ex1``, ``ex2``, ``ex3``."""
    r = 1.0 / math.sqrt(2.0)
    table = {
        "ex1": (0.0, 0.0, 1.0),
        "ex2": (1.0, 0.0, 0.0),
        "ex3": (r, 0.0, -r),
    }
    try:
        return SpinVector(*table[name])
    except KeyError:
        raise ValueError(f"unknown example {name!r}; expected one of {sorted(table)}") from None


def example3_condition(params: CoinParameters, spin: SpinVector, tol: float = 1e-12) -> bool:
    """``B = -A`` with ``A != 0``."""
    a, b = ab_constants(params, spin)
    return abs(a + b) <= tol and abs(a) > tol


def example3_spin_condition(params: CoinParameters, spin: SpinVector, tol: float = 1e-12) -> bool:
    """``beta = -sign(s) (alpha + gamma)/2`` with ``gamma != alpha``, intended for ``c = 1/3``."""
    sign = 1.0 if params.s > 0 else -1.0
    target = -sign * (spin.alpha + spin.gamma) / 2.0
    return abs(spin.beta - target) <= tol and abs(spin.gamma - spin.alpha) > tol
