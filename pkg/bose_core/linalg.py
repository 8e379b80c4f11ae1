# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
linalg contains the dense Hermitian linear algebra every other module is built on:
ingestion with symmetrization, eigendecomposition, spectral matrix functions and
trace utilities. All functions are pure.
"""

from typing import Callable, Union

import numpy as np
import scipy.linalg as la

from .exceptions import (
    DimensionMismatch,
    NotHermitian,
    NotPositiveSemidefinite,
    SpectralDomainError,
)
from .models import EigenSystem, HermitianMatrix

HERMITIAN_RTOL = 1e-12
PSD_CLIP_RTOL = 1e-12
TRACE_IMAG_TOL = 1e-12

MatrixLike = Union[HermitianMatrix, np.ndarray]


def as_array(a: MatrixLike) -> np.ndarray:
    """
    Returns the entries of ``a`` as a complex numpy array without copying when possible
    """
    if isinstance(a, HermitianMatrix):
        return a.entries
    return np.asarray(a, dtype=complex)


def hermitian_residual(a: np.ndarray) -> float:
    """
    Max-norm of A - A^dagger
    """
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def as_hermitian(a: MatrixLike, rtol: float = HERMITIAN_RTOL) -> HermitianMatrix:
    """
    Ingests a matrix: checks that it is square, finite and Hermitian within
    ``rtol`` times its max-norm, then averages it with its conjugate transpose.
    The pre-averaging residual is kept on the result.

    Example:

    .. code:: python

        h = bose_core.linalg.as_hermitian([[1, 1j], [-1j, 2]])
        print(h.dim, h.residual)

    :raises NotHermitian: The residual exceeds the tolerance
    """
    if isinstance(a, HermitianMatrix):
        return a
    array = np.array(a, dtype=complex)
    if array.ndim != 2:
        raise ValueError(f"Expected a matrix, got an array of shape {array.shape}")
    if array.shape[0] != array.shape[1]:
        raise DimensionMismatch("square matrix columns", array.shape[0], array.shape[1])
    if not np.all(np.isfinite(array)):
        raise ValueError("Matrix entries must be finite")
    residual = hermitian_residual(array)
    scale = float(np.max(np.abs(array))) if array.size else 0.0
    tolerance = rtol * scale
    if residual > tolerance:
        raise NotHermitian(residual, tolerance)
    return HermitianMatrix(entries=0.5 * (array + array.conj().T), residual=residual)


def check_same_dim(what: str, a: np.ndarray, b: np.ndarray) -> None:
    """
    Raises DimensionMismatch if the two square arrays differ in size
    """
    if a.shape != b.shape:
        raise DimensionMismatch(what, a.shape[0], b.shape[0])


def eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Raw eigendecomposition of an already-validated Hermitian array. Eigenvalues
    ascend. Internal callers use this on the hot path.
    """
    values, vectors = la.eigh(a, check_finite=False)
    return values, vectors


def eigendecompose(a: MatrixLike) -> EigenSystem:
    """
    Returns the eigendecomposition of a Hermitian matrix with ascending
    eigenvalues and orthonormal eigenvector columns

    :raises NotHermitian: Input is not Hermitian
    """
    h = as_hermitian(a)
    values, vectors = eigh(h.entries)
    return EigenSystem(eigenvalues=values, eigenvectors=vectors)


def spectral_norm(values: np.ndarray) -> float:
    """
    Spectral norm from a vector of eigenvalues
    """
    return float(np.max(np.abs(values))) if len(values) else 0.0


def clip_spectrum(values: np.ndarray, rtol: float = PSD_CLIP_RTOL) -> np.ndarray:
    """
    Clips eigenvalues of a nominally PSD matrix: entries with
    ``|lambda| <= rtol * ||A||`` become 0, anything more negative is an error

    :raises NotPositiveSemidefinite: A negative eigenvalue beyond the tolerance
    """
    values = np.asarray(values, dtype=float)
    tolerance = rtol * spectral_norm(values)
    if len(values) and values.min() < -tolerance:
        raise NotPositiveSemidefinite(float(values.min()), tolerance)
    clipped = values.copy()
    clipped[np.abs(clipped) <= tolerance] = 0.0
    return clipped


def psd_spectrum(a: MatrixLike, rtol: float = PSD_CLIP_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """
    Clipped eigenvalues and eigenvectors of a PSD matrix
    """
    h = as_hermitian(a)
    values, vectors = eigh(h.entries)
    return clip_spectrum(values, rtol), vectors


def apply_to_spectrum(
    values: np.ndarray, vectors: np.ndarray, f: Callable[[np.ndarray], np.ndarray]
) -> np.ndarray:
    """
    V diag(f(values)) V^dagger on raw arrays, checking that f is finite
    """
    with np.errstate(all="ignore"):
        mapped = np.asarray(f(np.asarray(values)), dtype=float)
    if mapped.shape != np.shape(values):
        mapped = np.broadcast_to(mapped, np.shape(values))
    bad = ~np.isfinite(mapped)
    if np.any(bad):
        index = int(np.argmax(bad))
        raise SpectralDomainError(float(values[index]), float(mapped[index]))
    out = (vectors * mapped) @ vectors.conj().T
    return 0.5 * (out + out.conj().T)


def spectral_apply(
    a: MatrixLike, f: Callable[[np.ndarray], np.ndarray]
) -> HermitianMatrix:
    """
    Applies the real scalar function ``f`` to a Hermitian matrix through its
    eigendecomposition: returns V diag(f(lambda)) V^dagger. ``f`` receives the
    whole eigenvalue vector and must be vectorized (numpy ufuncs are).

    Example:

    .. code:: python

        log_a = bose_core.linalg.spectral_apply(a, np.log)

    :raises SpectralDomainError: ``f`` is NaN or infinite on some eigenvalue
    """
    h = as_hermitian(a)
    values, vectors = eigh(h.entries)
    return HermitianMatrix(entries=apply_to_spectrum(values, vectors, f))


def trace_product(a: MatrixLike, b: MatrixLike) -> float:
    """
    Returns Re Tr[AB]. For Hermitian A, B the imaginary part stays below 1e-12
    (relative to ||A||_F ||B||_F when those exceed 1).

    :raises DimensionMismatch: Different dimensions
    :raises NotHermitian: The imaginary part is larger, so an operand is not Hermitian
    """
    x = as_array(a)
    y = as_array(b)
    check_same_dim("trace_product", x, y)
    value = np.einsum("ij,ji->", x, y)
    scale = max(1.0, float(np.linalg.norm(x) * np.linalg.norm(y)))
    if abs(value.imag) > TRACE_IMAG_TOL * scale:
        raise NotHermitian(abs(float(value.imag)), TRACE_IMAG_TOL * scale)
    return float(value.real)


def trace_norm(a: MatrixLike) -> float:
    """
    Schatten-1 norm from the eigenvalues
    """
    values, _ = eigh(as_hermitian(a).entries)
    return float(np.sum(np.abs(values)))


def operator_norm(a: MatrixLike) -> float:
    """
    Spectral norm from the eigenvalues
    """
    values, _ = eigh(as_hermitian(a).entries)
    return spectral_norm(values)
