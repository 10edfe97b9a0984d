"""
Exact finite-time evolution of the 3-state walk on the integer line.

The walk acts on amplitudes ``psi_t(x)`` in C^3, one per lattice site.  A
time step applies the coin ``C`` at every site and then shifts chirality 0
one site left, leaves chirality 1 in place and shifts chirality 2 one site
right.

Amplitudes are stored densely over the occupied interval
``[support_lo, support_hi]`` as an array of shape ``(n_sites, 3)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "InvalidParameters",
    "CoinParameters",
    "CoinOperator",
    "SpinVector",
    "WalkState",
    "ProbabilityDistribution",
    "build_coin",
    "localized_initial_state",
    "step",
    "evolve",
    "iter_evolve",
    "position_distribution",
    "component_probability",
]

# boundary cells with all |amplitude| below this are dropped from the support
TRIM_THRESHOLD = 1e-300
_UNIT_TOL = 1e-12


class InvalidParameters(ValueError):
    """Raised when a coin angle or spin violates its invariants."""


@dataclass(frozen=True)
class CoinParameters:
    """Coin angle ``theta`` together with ``c = cos(theta)`` and ``s = sin(theta)``.

    ``theta = 0`` and ``theta = pi`` give trivial walks and are rejected.
    """

    theta: float
    c: float
    s: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.theta, self.c, self.s)):
            raise InvalidParameters("coin parameters must be finite")
        if abs(self.c * self.c + self.s * self.s - 1.0) > _UNIT_TOL:
            raise InvalidParameters(
                f"(c, s) = ({self.c!r}, {self.s!r}) is not on the unit circle"
            )
        if abs(self.s) < _UNIT_TOL:
            raise InvalidParameters("theta = 0 and theta = pi are excluded (sin(theta) = 0)")

    @classmethod
    def from_theta(cls, theta: float) -> "CoinParameters":
        theta = float(theta)
        return cls(theta, math.cos(theta), math.sin(theta))

    @classmethod
    def from_cs(cls, c: float, s: float) -> "CoinParameters":
        """Build from an explicit ``(cos, sin)`` pair, kept exactly as given.

        Useful for parameters such as ``c = 1/3`` where round-tripping
        through an angle would perturb the last bits.
        """
        c, s = float(c), float(s)
        return cls(math.atan2(s, c) % (2.0 * math.pi), c, s)

    @classmethod
    def grover(cls) -> "CoinParameters":
        return cls.from_cs(-1.0 / 3.0, 2.0 * math.sqrt(2.0) / 3.0)


@dataclass(frozen=True)
class CoinOperator:
    """A 3x3 coin matrix; indices 0, 1, 2 are the chirality states."""

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        m = np.array(self.entries)
        if m.shape != (3, 3):
            raise ValueError(f"coin must be 3x3, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def unitarity_defect(self) -> float:
        m = self.entries
        return float(np.abs(m.conj().T @ m - np.eye(3)).max())


@dataclass(frozen=True)
class SpinVector:
    """Initial chirality weights ``(alpha, beta, gamma)``, unit norm."""

    alpha: complex
    beta: complex
    gamma: complex

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2 + abs(self.gamma) ** 2
        if abs(norm2 - 1.0) > _UNIT_TOL:
            raise InvalidParameters(f"spin is not normalised: |alpha|^2+|beta|^2+|gamma|^2 = {norm2!r}")

    @classmethod
    def normalized(cls, alpha: complex, beta: complex, gamma: complex) -> "SpinVector":
        """Rescale an arbitrary nonzero triple to unit norm."""
        v = np.array([alpha, beta, gamma], dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise InvalidParameters("spin must be nonzero")
        v = v / norm
        return cls(v[0], v[1], v[2])

    @classmethod
    def uniform(cls) -> "SpinVector":
        return cls(*(3 * [1.0 / math.sqrt(3.0)]))

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([self.alpha, self.beta, self.gamma], dtype=complex)

    def mirrored(self) -> "SpinVector":
        """Swap chiralities 0 and 2."""
        return SpinVector(self.gamma, self.beta, self.alpha)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WalkState:
    """Amplitudes ``psi(x)`` for ``x`` in ``[support_lo, support_hi]``, zero elsewhere."""

    support_lo: int
    amplitudes: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != 3 or amps.shape[0] == 0:
            raise ValueError(f"amplitudes must have shape (n_sites >= 1, 3), got {amps.shape}")
        object.__setattr__(self, "support_lo", int(self.support_lo))
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def support_hi(self) -> int:
        return self.support_lo + self.amplitudes.shape[0] - 1

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.support_lo, self.support_hi + 1)

    def amplitude(self, x: int) -> NDArray[np.complex128]:
        """``psi(x)`` as a length-3 vector (zeros outside the support)."""
        if self.support_lo <= x <= self.support_hi:
            return self.amplitudes[x - self.support_lo].copy()
        return np.zeros(3, dtype=complex)

    def window(self, lo: int, hi: int) -> NDArray[np.complex128]:
        """Amplitudes on ``[lo, hi]`` as an array of shape ``(hi - lo + 1, 3)``."""
        out = np.zeros((hi - lo + 1, 3), dtype=complex)
        a, b = max(lo, self.support_lo), min(hi, self.support_hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.amplitudes[a - self.support_lo : b - self.support_lo + 1]
        return out

    def norm2(self) -> float:
        return float(_site_probabilities(self.amplitudes).sum())


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Masses on the integer interval ``[support_lo, support_hi]``."""

    support_lo: int
    masses: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "support_lo", int(self.support_lo))
        object.__setattr__(self, "masses", _freeze(np.array(self.masses, dtype=float)))

    @property
    def support_hi(self) -> int:
        return self.support_lo + self.masses.shape[0] - 1

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.support_lo, self.support_hi + 1)

    def __getitem__(self, x: int) -> float:
        if self.support_lo <= x <= self.support_hi:
            return float(self.masses[x - self.support_lo])
        return 0.0

    def window(self, lo: int, hi: int) -> NDArray[np.float64]:
        out = np.zeros(hi - lo + 1)
        a, b = max(lo, self.support_lo), min(hi, self.support_hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.masses[a - self.support_lo : b - self.support_lo + 1]
        return out

    def total(self) -> float:
        return float(self.masses.sum())


def build_coin(params: CoinParameters) -> CoinOperator:
    """Return the coin matrix for angle ``params.theta``.

    Rows are ``(-(1+c)/2, s/sqrt2, (1-c)/2)``, ``(s/sqrt2, c, s/sqrt2)`` and
    ``((1-c)/2, s/sqrt2, -(1+c)/2)``; at ``c = -1/3`` this is the Grover coin.
    """
    c, s = params.c, params.s
    d = -(1.0 + c) / 2.0
    o = (1.0 - c) / 2.0
    r = s / math.sqrt(2.0)
    return CoinOperator(np.array([[d, r, o], [r, c, r], [o, r, d]], dtype=float))


def localized_initial_state(spin: SpinVector) -> WalkState:
    return WalkState(0, spin.as_array()[None, :])


def _site_probabilities(amps: np.ndarray) -> np.ndarray:
    q = amps.real**2 + amps.imag**2
    # middle term first: the sum is then invariant under swapping chiralities 0 and 2
    return q[:, 1] + (q[:, 0] + q[:, 2])


def _advance(amps: np.ndarray, lo: int, m: np.ndarray) -> tuple[np.ndarray, int]:
    # out_i = m_i1 psi_1 + (m_i0 psi_0 + m_i2 psi_2): keeps the x <-> -x mirror bit-exact
    p0, p1, p2 = amps[:, 0], amps[:, 1], amps[:, 2]
    n = amps.shape[0]
    new = np.zeros((n + 2, 3), dtype=complex)
    new[:n, 0] = m[0, 1] * p1 + (m[0, 0] * p0 + m[0, 2] * p2)
    new[1 : n + 1, 1] = m[1, 1] * p1 + (m[1, 0] * p0 + m[1, 2] * p2)
    new[2:, 2] = m[2, 1] * p1 + (m[2, 0] * p0 + m[2, 2] * p2)
    lo -= 1

    small = np.all(np.abs(new) < TRIM_THRESHOLD, axis=1)
    if small.all():
        # everything underflowed; keep one cell so the state stays well formed
        return new[:1], lo
    first = int(np.argmin(small))
    last = new.shape[0] - int(np.argmin(small[::-1]))
    return new[first:last], lo + first


def step(state: WalkState, coin: CoinOperator) -> WalkState:
    """Apply one coin-then-shift step."""
    amps, lo = _advance(state.amplitudes, state.support_lo, np.asarray(coin.entries))
    return WalkState(lo, amps)


def iter_evolve(state: WalkState, coin: CoinOperator, t: int) -> Iterator[WalkState]:
    """Yield the states at times ``0, 1, ..., t`` (the input first)."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    m = np.asarray(coin.entries)
    amps, lo = state.amplitudes, state.support_lo
    yield state
    for _ in range(t):
        amps, lo = _advance(amps, lo, m)
        yield WalkState(lo, amps)


def evolve(state: WalkState, coin: CoinOperator, t: int) -> WalkState:
    """Apply ``t`` steps; ``t = 0`` returns ``state`` itself."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0:
        return state
    m = np.asarray(coin.entries)
    amps, lo = state.amplitudes, state.support_lo
    for _ in range(t):
        amps, lo = _advance(amps, lo, m)
    return WalkState(lo, amps)


def position_distribution(state: WalkState) -> ProbabilityDistribution:
    """``P(X = x) = sum_j |psi(x)_j|^2`` over the support of ``state``."""
    return ProbabilityDistribution(state.support_lo, _site_probabilities(state.amplitudes))


def component_probability(state: WalkState, x: int, j: int) -> float:
    """Probability of observing the walker at ``x`` in chirality ``j``."""
    if j not in (0, 1, 2):
        raise ValueError(f"chirality index must be 0, 1 or 2, got {j!r}")
    a = state.amplitude(x)[j]
    return float(a.real**2 + a.imag**2)
