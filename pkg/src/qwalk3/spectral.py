"""
Fourier-space picture of the walk.

With ``Psi_hat(k) = sum_x exp(-ikx) psi(x)`` one step becomes multiplication
by ``C_hat(k) = diag(e^{ik}, 1, e^{-ik}) C``.  This module provides that
matrix, its eigensystem (closed form and numerical), the factorisation of
the coin into five rotations, and an evolution routine that goes through
Fourier space entirely and so serves as an independent check on
:func:`qwalk3.core.evolve`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .core import CoinParameters, WalkState, build_coin

__all__ = [
    "DegenerateEigenvector",
    "InsufficientQuadrature",
    "FourierCoin",
    "EigenSystem",
    "fourier_coin",
    "eigenvalue_radicand",
    "eigenvalues",
    "eigenvector_unnormalized",
    "characteristic_polynomial",
    "cubic_roots",
    "eigensystem_3x3",
    "eigensystem",
    "rotation_decomposition",
    "required_quadrature_points",
    "evolve_via_fourier",
]

# closed-form eigenvector denominators below this are treated as singular
DENOMINATOR_TOL = 1e-9
# roots of the characteristic cubic closer than this are one eigenspace
_CLUSTER_TOL = 1e-6
_SHIFT_OFFSET = 1e-10


class DegenerateEigenvector(ArithmeticError):
    """The closed-form eigenvector has a vanishing denominator at this k."""


class InsufficientQuadrature(ValueError):
    """Too few k-grid points to integrate a t-step walk exactly."""


@dataclass(frozen=True)
class FourierCoin:
    k: float
    matrix: NDArray[np.complex128]


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of ``C_hat(k)``; ``vectors[:, j]`` belongs to ``lambdas[j]``.

    The flat band ``lambda = 1`` comes first, then the eigenvalue with
    positive imaginary part.
    """

    k: float
    lambdas: NDArray[np.complex128]
    vectors: NDArray[np.complex128]


def _shift_phases(k: float) -> NDArray[np.complex128]:
    return np.array([np.exp(1j * k), 1.0, np.exp(-1j * k)])


def fourier_coin(params: CoinParameters, k: float) -> FourierCoin:
    m = _shift_phases(k)[:, None] * build_coin(params).entries
    return FourierCoin(float(k), m)


def eigenvalue_radicand(params: CoinParameters, k: float) -> float:
    """``4 - {(1+c) cos k + 1 - c}^2``, non-negative for every k."""
    a = (1.0 + params.c) * math.cos(k) + (1.0 - params.c)
    # 2 - a = 2(1+c) sin^2(k/2); factoring avoids cancellation near k = 0
    return 2.0 * (1.0 + params.c) * math.sin(k / 2.0) ** 2 * (2.0 + a)


def eigenvalues(params: CoinParameters, k: float) -> tuple[complex, complex, complex]:
    """Closed-form eigenvalues ``(1, lambda_2, lambda_3)`` of ``C_hat(k)``.

    ``lambda_j = [-a + i (-1)^j sqrt(4 - a^2)] / 2`` with
    ``a = (1+c) cos k + (1-c)``, so ``lambda_2`` carries ``+i``.
    """
    a = (1.0 + params.c) * math.cos(k) + (1.0 - params.c)
    rad = eigenvalue_radicand(params, k)
    assert rad >= 0.0, f"negative radicand {rad!r}"
    root = math.sqrt(max(rad, 0.0))
    return 1.0 + 0.0j, complex(-a, root) / 2.0, complex(-a, -root) / 2.0


def eigenvector_unnormalized(params: CoinParameters, k: float, j: int) -> NDArray[np.complex128]:
    """Closed-form eigenvector ``w_j(k)`` for ``j`` in ``{1, 2, 3}``.

    Components are ``1/(1 + l e^{-ik})``, ``sqrt2 s/((1-c)(1+l))`` and
    ``1/(1 + l e^{ik})`` with ``l = lambda_j(k)``.

    Raises
    ------
    DegenerateEigenvector
        If any denominator is smaller than ``DENOMINATOR_TOL`` in modulus
        (e.g. ``lambda_2 = -1`` at ``k = 0``, or ``j = 1`` at ``k = pi``).
    """
    if j not in (1, 2, 3):
        raise ValueError(f"j must be 1, 2 or 3, got {j!r}")
    lam = eigenvalues(params, k)[j - 1]
    c, s = params.c, params.s
    dens = (
        1.0 + lam * np.exp(-1j * k),
        (1.0 - c) * (1.0 + lam),
        1.0 + lam * np.exp(1j * k),
    )
    if min(abs(d) for d in dens) < DENOMINATOR_TOL:
        raise DegenerateEigenvector(f"w_{j}(k) is singular at k={k!r}")
    return np.array([1.0 / dens[0], math.sqrt(2.0) * s / dens[1], 1.0 / dens[2]])


# --- generic 3x3 solver: characteristic cubic + inverse iteration ----------


def characteristic_polynomial(m: np.ndarray) -> tuple[complex, complex, complex]:
    """Coefficients ``(a2, a1, a0)`` of ``det(lI - m) = l^3 + a2 l^2 + a1 l + a0``."""
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    minors = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    det = (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
    return complex(-tr), complex(minors), complex(-det)


def cubic_roots(a2: complex, a1: complex, a0: complex) -> list[complex]:
    """The three roots of ``l^3 + a2 l^2 + a1 l + a0`` (Cardano, then Newton-polished)."""
    shift = a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    sq = disc**0.5
    u3 = -q / 2.0 + sq
    if abs(u3) < abs(-q / 2.0 - sq):
        u3 = -q / 2.0 - sq
    omega = complex(-0.5, math.sqrt(3.0) / 2.0)
    if abs(u3) == 0.0:
        roots = [-shift] * 3
    else:
        u = u3 ** (1.0 / 3.0)
        roots = []
        for r in range(3):
            ur = u * omega**r
            roots.append(ur - p / (3.0 * ur) - shift)

    def poly(z):
        return ((z + a2) * z + a1) * z + a0

    def dpoly(z):
        return (3.0 * z + 2.0 * a2) * z + a1

    polished = []
    for z in roots:
        for _ in range(3):
            d = dpoly(z)
            if abs(d) < 1e-14:
                break
            dz = poly(z) / d
            z -= dz
            if abs(dz) < 1e-16:
                break
        polished.append(z)
    return polished


def _clusters(values: list[complex], tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        for g in groups:
            if abs(values[g[0]] - v) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _rayleigh_refine(m: np.ndarray, v: np.ndarray, basis: list[np.ndarray], sweeps: int = 2) -> np.ndarray:
    eye = np.eye(3, dtype=complex)
    for _ in range(sweeps):
        mu = v.conj() @ m @ v + _SHIFT_OFFSET * (1 + 1j)
        try:
            w = np.linalg.solve(m - mu * eye, v)
        except np.linalg.LinAlgError:
            break
        for b in basis:
            w -= (b.conj() @ w) * b
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0.0:
            break
        v = w / nw
    return v


def _split_pair(m: np.ndarray, pair: list[np.ndarray]) -> list[np.ndarray]:
    # a merged cluster may still hold two distinct eigenvalues; diagonalise m on its span
    q = np.column_stack(pair)
    b = q.conj().T @ m @ q
    half = (b[0, 0] - b[1, 1]) / 2.0
    if abs(b[0, 1]) + abs(b[1, 0]) < 1e-15 * (1.0 + abs(half)):
        return pair
    disc = (half * half + b[0, 1] * b[1, 0]) ** 0.5
    lam = (b[0, 0] + b[1, 1]) / 2.0 + disc
    u = np.array([b[0, 1], lam - b[0, 0]])
    alt = np.array([lam - b[1, 1], b[1, 0]])
    if np.linalg.norm(alt) > np.linalg.norm(u):
        u = alt
    u = u / np.linalg.norm(u)
    # the span is 2-dimensional and m is normal, so the partner is the orthogonal complement
    w = np.array([-u[1].conjugate(), u[0].conjugate()])
    return [q @ u, q @ w]


def eigensystem_3x3(m: np.ndarray) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Eigenvalues and orthonormal eigenvectors of a normal 3x3 matrix.

    Roots of the characteristic cubic seed inverse iteration; repeated roots
    are handled as one eigenspace and orthonormalised.  Eigenvalues are then
    refined by Rayleigh quotients, which repairs the poor conditioning of
    double roots.
    """
    m = np.asarray(m, dtype=complex)
    roots = cubic_roots(*characteristic_polynomial(m))
    eye = np.eye(3, dtype=complex)
    basis: list[np.ndarray] = []
    for group in _clusters(roots, _CLUSTER_TOL):
        mu = sum(roots[i] for i in group) / len(group) + _SHIFT_OFFSET * (1 + 1j)
        shifted = m - mu * eye
        candidates = [np.linalg.solve(shifted, e) for e in eye]
        picked: list[np.ndarray] = []
        for _ in group:
            best = None
            for v in candidates:
                w = v.copy()
                for b in basis + picked:
                    w -= (b.conj() @ w) * b
                if best is None or np.linalg.norm(w) > np.linalg.norm(best):
                    best = w
            best = np.linalg.solve(shifted, best / np.linalg.norm(best))
            for b in basis + picked:
                best -= (b.conj() @ best) * b
            picked.append(best / np.linalg.norm(best))
        if len(picked) == 2:
            picked = _split_pair(m, picked)
        elif len(picked) == 1:
            picked = [_rayleigh_refine(m, picked[0], basis)]
        basis.extend(picked)
    vecs = np.column_stack(basis)
    lams = np.einsum("ij,ik,kj->j", vecs.conj(), m, vecs)
    return lams, vecs


def eigensystem(params: CoinParameters, k: float) -> EigenSystem:
    """Numerical eigensystem of ``C_hat(k)``, ordered as the closed form."""
    lams, vecs = eigensystem_3x3(fourier_coin(params, k).matrix)
    flat = int(np.argmin(np.abs(lams - 1.0)))
    rest = [i for i in range(3) if i != flat]
    rest.sort(key=lambda i: -lams[i].imag)
    order = [flat] + rest
    return EigenSystem(float(k), lams[order], vecs[:, order])


def rotation_decomposition(params: CoinParameters) -> list[NDArray[np.float64]]:
    """Five orthogonal factors whose ordered product is the coin."""
    c, s = params.c, params.s
    r = 1.0 / math.sqrt(2.0)
    swap = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    eighth = np.array([[r, -r, 0.0], [r, r, 0.0], [0.0, 0.0, 1.0]])
    middle = np.array([[-c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, -c]])
    return [swap, eighth.copy(), middle, eighth.copy(), swap.copy()]


def required_quadrature_points(initial: WalkState, t: int) -> int:
    """Smallest k-grid accepted by :func:`evolve_via_fourier`.

    ``4t + 4`` for a single-site start, padded by the width of a wider one
    so the trapezoid rule stays alias-free.
    """
    width = initial.support_hi - initial.support_lo
    return 4 * t + 4 + width


def evolve_via_fourier(
    params: CoinParameters,
    initial: WalkState,
    t: int,
    quadrature_points: int | None = None,
) -> WalkState:
    """Evolve ``initial`` by ``t`` steps through Fourier space.

    The initial transform is sampled on a uniform grid over ``[-pi, pi)``,
    multiplied by ``C_hat(k)^t`` from the numerical eigensystem at every
    node, and inverted with the trapezoid rule.  The integrand is a
    trigonometric polynomial, so for enough nodes this is exact up to
    rounding.  The result covers ``[lo - t, hi + t]``.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    need = required_quadrature_points(initial, t)
    n = need if quadrature_points is None else int(quadrature_points)
    if n < need:
        raise InsufficientQuadrature(f"{n} quadrature points given, need at least {need} for t={t}")

    ks = -math.pi + 2.0 * math.pi * np.arange(n) / n
    src = initial.positions
    psi0_hat = np.exp(-1j * np.outer(ks, src)) @ initial.amplitudes

    psit_hat = np.empty_like(psi0_hat)
    for i, k in enumerate(ks):
        es = eigensystem(params, float(k))
        coeffs = es.vectors.conj().T @ psi0_hat[i]
        psit_hat[i] = es.vectors @ (es.lambdas**t * coeffs)

    out = np.arange(initial.support_lo - t, initial.support_hi + t + 1)
    amps = np.exp(1j * np.outer(out, ks)) @ psit_hat / n
    return WalkState(int(out[0]), amps)
