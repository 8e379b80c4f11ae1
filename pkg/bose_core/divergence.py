# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
divergence contains the Bose-Einstein relative entropy
D_BE(X||Y) = -S_BE(X) + Tr[(X+I)ln(Y+I) - X ln Y] and the checks built on it
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from .exceptions import SpectralDomainError
from .linalg import (
    MatrixLike,
    as_hermitian,
    check_same_dim,
    psd_spectrum,
    spectral_norm,
)
from .models import AffineChannelParams, MonotonicityCheck, SdpInstance
from .sdp import DualLike
from .thermal import hessian, scalar_entropy

SUPPORT_RTOL = 1e-14
LEAK_RTOL = 1e-10
MONOTONE_TOL = 1e-10
QUADRATURE_NODES = 64


def scalar_dbe(x: float | np.ndarray, y: float | np.ndarray) -> float | np.ndarray:
    """
    d_BE(x||y) = x ln(x/y) + (x+1) ln((y+1)/(x+1)), with d_BE(0||y) = ln(y+1)
    and +inf for y = 0 < x. Works elementwise on arrays.

    Example:

    .. code:: python

        bose_core.divergence.scalar_dbe(1.0, 2.0)  # ln(9/8)
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(xa < 0.0) or np.any(ya < 0.0):
        raise ValueError("scalar_dbe needs x, y >= 0")
    with np.errstate(divide="ignore"):
        value = xlogy(xa, xa) - xlogy(xa, ya) + (xa + 1.0) * (np.log1p(ya) - np.log1p(xa))
    if np.ndim(value) == 0:
        return float(value)
    return value


class _Spectra(NamedTuple):
    x_values: np.ndarray
    x_vectors: np.ndarray
    y_values: np.ndarray
    y_vectors: np.ndarray
    x_entries: np.ndarray


def _spectra(X: MatrixLike, Y: MatrixLike) -> _Spectra:
    x = as_hermitian(X)
    y = as_hermitian(Y)
    check_same_dim("divergence operands", x.entries, y.entries)
    x_values, x_vectors = psd_spectrum(x)
    y_values, y_vectors = psd_spectrum(y)
    return _Spectra(x_values, x_vectors, y_values, y_vectors, x.entries)


def _weights_in_basis(entries: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """<phi_j|A|phi_j> for every column phi_j"""
    return np.einsum("aj,ab,bj->j", vectors.conj(), entries, vectors).real


def _support_split(s: _Spectra, support_rtol: float) -> tuple[np.ndarray, np.ndarray, bool]:
    """Returns X's weights in Y's eigenbasis, the null mask of Y and whether X leaks into it"""
    weights = _weights_in_basis(s.x_entries, s.y_vectors)
    null = s.y_values <= support_rtol * spectral_norm(s.y_values)
    leak_tol = LEAK_RTOL * max(spectral_norm(s.x_values), 1.0)
    leaks = bool(np.any(weights[null] > leak_tol))
    return weights, null, leaks


def dbe(X: MatrixLike, Y: MatrixLike, support_rtol: float = SUPPORT_RTOL) -> float:
    """
    The Bose-Einstein relative entropy of two PSD matrices. Eigenvalues of Y
    at or below ``support_rtol``·||Y|| count as zero; when X has weight on that
    null space the result is +inf.

    :raises NotPositiveSemidefinite: Either operand has a negative eigenvalue
    :raises DimensionMismatch: The operands differ in size
    """
    s = _spectra(X, Y)
    weights, null, leaks = _support_split(s, support_rtol)
    if leaks:
        return math.inf
    entropy = float(np.sum(scalar_entropy(s.x_values)))
    cross = float(np.sum((weights + 1.0) * np.log1p(s.y_values)))
    live = ~null
    log_term = float(np.sum(weights[live] * np.log(s.y_values[live])))
    return -entropy + cross - log_term


def dbe_spectral(X: MatrixLike, Y: MatrixLike, support_rtol: float = SUPPORT_RTOL) -> float:
    """
    sum_ij d_BE(x_i||y_j)·|<psi_i|phi_j>|² over the eigenpairs of X and Y

    :raises SpectralDomainError: Y is singular
    """
    s = _spectra(X, Y)
    lowest = float(s.y_values[0])
    if lowest <= support_rtol * spectral_norm(s.y_values):
        raise SpectralDomainError(lowest, -math.inf)
    overlaps = np.abs(s.x_vectors.conj().T @ s.y_vectors) ** 2
    table = scalar_dbe(s.x_values[:, None], s.y_values[None, :])
    return float(np.sum(table * overlaps))


def umegaki_relative_entropy(A: MatrixLike, B: MatrixLike, support_rtol: float = SUPPORT_RTOL) -> float:
    """
    Tr[A ln A - A ln B - A + B] for PSD A and B, not assumed normalized.
    +inf when the support of A is not inside the support of B.
    """
    s = _spectra(A, B)
    weights, null, leaks = _support_split(s, support_rtol)
    if leaks:
        return math.inf
    live = ~null
    return float(
        np.sum(xlogy(s.x_values, s.x_values))
        - np.sum(weights[live] * np.log(s.y_values[live]))
        - np.sum(s.x_values)
        + np.sum(s.y_values)
    )


def umegaki_residual(X: MatrixLike, Y: MatrixLike) -> float:
    """D_BE(X||Y) - [D(X||Y) - D(X+I||Y+I)]"""
    x = as_hermitian(X).entries
    y = as_hermitian(Y).entries
    eye = np.eye(len(x))
    return dbe(x, y) - (umegaki_relative_entropy(x, y) - umegaki_relative_entropy(x + eye, y + eye))


def bregman_residual(X: MatrixLike, Y: MatrixLike) -> float:
    """
    D_BE(X||Y) - {F(X) - F(Y) - Tr[(ln Y - ln(Y+I))(X - Y)]} with F = -S_BE.
    Y must be strictly positive definite.
    """
    s = _spectra(X, Y)
    lowest = float(s.y_values[0])
    if lowest <= SUPPORT_RTOL * spectral_norm(s.y_values):
        raise SpectralDomainError(lowest, -math.inf)
    weights = _weights_in_basis(s.x_entries, s.y_vectors)
    grad = np.log(s.y_values) - np.log1p(s.y_values)
    linear = float(np.sum(grad * (weights - s.y_values)))
    f_x = -float(np.sum(scalar_entropy(s.x_values)))
    f_y = -float(np.sum(scalar_entropy(s.y_values)))
    return dbe(X, Y) - (f_x - f_y - linear)


def bregman_integral(x: float, y: float, nodes: int = QUADRATURE_NODES) -> float:
    """
    (x - y)²·∫_0^1 (1 - t)/(z_t(z_t + 1)) dt with z_t = y + t(x - y), by
    Gauss-Legendre quadrature. Equals d_BE(x||y) for x, y > 0.
    """
    if x <= 0.0 or y <= 0.0:
        raise ValueError("bregman_integral needs x, y > 0")
    u, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (u + 1.0)
    z = y + t * (x - y)
    return float((x - y) ** 2 * 0.5 * np.sum(w * (1.0 - t) / (z * (z + 1.0))))


def apply_channel(X: MatrixLike, params: AffineChannelParams) -> np.ndarray:
    """aX + bI"""
    x = as_hermitian(X).entries
    return params.a * x + params.b * np.eye(len(x))


def affine_monotonicity_check(
    X: MatrixLike,
    Y: MatrixLike,
    params: AffineChannelParams,
    support_rtol: float = SUPPORT_RTOL,
) -> MonotonicityCheck:
    """
    Evaluates both sides of D_BE(X||Y) >= D_BE(aX+bI||aY+bI). The inequality
    is guaranteed when 2b + 1 >= a.

    Example:

    .. code:: python

        check = bose_core.divergence.affine_monotonicity_check(
            X, Y, AffineChannelParams.attenuator(0.5, 0.0)
        )
        assert check.holds
    """
    identity = AffineChannelParams.raw(1.0, 0.0)
    lhs = dbe(apply_channel(X, identity), apply_channel(Y, identity), support_rtol)
    rhs = dbe(apply_channel(X, params), apply_channel(Y, params), support_rtol)
    return MonotonicityCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - MONOTONE_TOL, params=params)


def monotonicity_violation_scan(
    params: AffineChannelParams, points: int = 50, upper: float = 5.0
) -> list[tuple[float, float, float, float]]:
    """
    Scans scalar pairs (x, y) on the grid (0, upper]² and returns every
    (x, y, lhs, rhs) where d_BE(x||y) < d_BE(ax+b||ay+b) - 1e-10
    """
    grid = upper * np.arange(1, points + 1) / points
    x, y = np.meshgrid(grid, grid, indexing="ij")
    lhs = scalar_dbe(x, y)
    rhs = scalar_dbe(params.a * x + params.b, params.a * y + params.b)
    bad = lhs < rhs - MONOTONE_TOL
    return [
        (float(a), float(b), float(l), float(r))
        for a, b, l, r in zip(x[bad], y[bad], lhs[bad], rhs[bad])  # type: ignore[index]
    ]


def scalar_hessian(x: float, y: float) -> np.ndarray:
    """The 2x2 Hessian of (x, y) -> d_BE(x||y)"""
    off = -1.0 / (y * (y + 1.0))
    return np.array(
        [
            [1.0 / (x * (x + 1.0)), off],
            [off, x / y**2 - (x + 1.0) / (y + 1.0) ** 2],
        ]
    )


def joint_convexity_det(x: float, y: float) -> float:
    """-(x - y)²/(x(x+1)y²(y+1)²), negative whenever x != y"""
    if x <= 0.0 or y <= 0.0:
        raise ValueError("joint_convexity_det needs x, y > 0")
    return -((x - y) ** 2) / (x * (x + 1.0) * y**2 * (y + 1.0) ** 2)


def joint_convexity_witness(
    x: float, y: float, max_halvings: int = 40
) -> tuple[tuple[float, float], tuple[float, float], float]:
    """
    Two scalar pairs p1, p2 with midpoint (x, y) such that
    d_BE(midpoint) exceeds the mean of d_BE(p1) and d_BE(p2). They are found
    along the negative-curvature direction of the Hessian at (x, y). Returns
    (p1, p2, gap) with gap > 0.

    :raises ValueError: x == y, where the Hessian has no negative direction
    """
    if joint_convexity_det(x, y) >= 0.0:
        raise ValueError("the scalar Hessian is not indefinite at x == y")
    values, vectors = np.linalg.eigh(scalar_hessian(x, y))
    direction = vectors[:, 0]
    step = 0.5 * min(x, y)
    middle = float(scalar_dbe(x, y))
    for _ in range(max_halvings):
        p1 = (x + step * direction[0], y + step * direction[1])
        p2 = (x - step * direction[0], y - step * direction[1])
        if min(p1 + p2) > 0.0:
            mean = 0.5 * (float(scalar_dbe(*p1)) + float(scalar_dbe(*p2)))
            if middle > mean:
                return p1, p2, middle - mean
        step *= 0.5
    raise ValueError(f"no witness found around ({x}, {y})")


def fisher_information(inst: SdpInstance, mu: DualLike, T: float) -> np.ndarray:
    """
    I(mu) = -(1/T)·Hess f_T(mu), positive semidefinite

    :raises DualInfeasible: K_mu is not positive definite
    """
    return -hessian(inst, mu, T) / T

