# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
thermal contains the Bose-Einstein entropy, thermal operators and the
temperature-T dual objective with its analytic gradient and Hessian, together
with smoothness constants and the temperature schedules that bound the
regularization error.
"""

import math
from typing import Optional, Union

import numpy as np
from scipy.special import xlogy

from .exceptions import DualInfeasible, InvalidSchedule
from .linalg import (
    PSD_CLIP_RTOL,
    MatrixLike,
    as_hermitian,
    eigh,
    operator_norm,
    psd_spectrum,
    trace_norm,
)
from .logging_utils import logger
from .models import (
    ApproximationBounds,
    BoundCheck,
    EigenSystem,
    HermitianMatrix,
    SdpInstance,
    SmoothnessBound,
    TemperatureSchedule,
    ThermalOperator,
)
from .sdp import DualLike, as_dual_point, slack_entries, spectral_summary

OVERFLOW_RATIO = 700.0
TAYLOR_RTOL = 1e-7

ArrayOrFloat = Union[float, np.ndarray]


def _check_temperature(T: float) -> None:
    if not T > 0.0 or not math.isfinite(T):
        raise ValueError(f"Temperature must be positive and finite, got {T!r}")


def occupation(values: ArrayOrFloat, T: float) -> np.ndarray:
    """
    Bose-Einstein occupation 1/(e^{lambda/T} - 1) for lambda > 0, set to 0
    once lambda/T exceeds 700
    """
    ratio = np.asarray(values, dtype=float) / T
    out = np.zeros_like(ratio)
    live = ratio <= OVERFLOW_RATIO
    out[live] = 1.0 / np.expm1(ratio[live])
    return out


def log_partition_terms(values: np.ndarray, T: float) -> np.ndarray:
    """T·ln(1 - e^{-lambda/T}) per eigenvalue, 0 once lambda/T exceeds 700"""
    ratio = np.asarray(values, dtype=float) / T
    out = np.zeros_like(ratio)
    live = ratio <= OVERFLOW_RATIO
    out[live] = T * np.log(-np.expm1(-ratio[live]))
    return out


def scalar_entropy(x: ArrayOrFloat) -> ArrayOrFloat:
    """
    g(x) = (x+1)ln(x+1) - x ln x with 0 ln 0 = 0. Accepts scalars or arrays.

    :raises ValueError: Negative input
    """
    array = np.asarray(x, dtype=float)
    if np.any(array < 0.0):
        raise ValueError("scalar_entropy needs x >= 0")
    value = xlogy(array + 1.0, array + 1.0) - xlogy(array, array)
    if np.ndim(value) == 0:
        return float(value)
    return value


def be_entropy(X: MatrixLike, rtol: float = PSD_CLIP_RTOL) -> float:
    """
    S_BE(X) = Tr[(X+I)ln(X+I) - X ln X], summed over the clipped spectrum

    :raises NotPositiveSemidefinite: X has a negative eigenvalue beyond the clip tolerance
    """
    values, _ = psd_spectrum(X, rtol)
    return float(np.sum(scalar_entropy(values)))


def _positive_spectrum(K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values, vectors = eigh(K)
    if values[0] <= 0.0:
        raise DualInfeasible(float(values[0]))
    return values, vectors


def thermal_operator(K: MatrixLike, T: float) -> ThermalOperator:
    """
    Builds X_T = (e^{K/T} - I)^{-1} and X_T + I = (I - e^{-K/T})^{-1} in the
    eigenbasis of K

    Example:

    .. code:: python

        op = bose_core.thermal.thermal_operator(np.diag([1.0, 2.0]), 1.0)
        print(op.occupations)  # [0.58198, 0.15652]

    :raises DualInfeasible: K is not strictly positive definite
    """
    _check_temperature(T)
    values, vectors = _positive_spectrum(as_hermitian(K).entries)
    x = occupation(values, T)
    X = (vectors * x) @ vectors.conj().T
    X_plus_I = (vectors * (x + 1.0)) @ vectors.conj().T
    return ThermalOperator(
        X=HermitianMatrix(entries=0.5 * (X + X.conj().T)),
        X_plus_I=HermitianMatrix(entries=0.5 * (X_plus_I + X_plus_I.conj().T)),
        K_spectrum=EigenSystem(eigenvalues=values, eigenvectors=vectors),
        temperature=T,
        occupations=x,
    )


def thermal_state(inst: SdpInstance, mu: DualLike, T: float) -> ThermalOperator:
    """X_T(mu), the thermal operator of K_mu"""
    return thermal_operator(slack_entries(inst, mu), T)


def dual_objective(inst: SdpInstance, mu: DualLike, T: float) -> float:
    """
    f_T(mu) = mu·q + T·sum_j ln(1 - e^{-lambda_j/T}) over the spectrum of K_mu

    :raises DualInfeasible: K_mu is not strictly positive definite
    """
    _check_temperature(T)
    vector = as_dual_point(mu).mu
    values, _ = _positive_spectrum(slack_entries(inst, vector))
    return float(vector @ inst.q + np.sum(log_partition_terms(values, T)))


def unregularized_energy(inst: SdpInstance, mu: DualLike, T: float) -> float:
    """
    f̃_T(mu) = mu·q + Tr[K_mu X_T(mu)]. At a dual optimum this is Tr[H X_T].
    """
    _check_temperature(T)
    vector = as_dual_point(mu).mu
    values, _ = _positive_spectrum(slack_entries(inst, vector))
    return float(vector @ inst.q + np.sum(values * occupation(values, T)))


def _rotated_constraints(inst: SdpInstance, vectors: np.ndarray) -> np.ndarray:
    """V† Q_i V for every constraint"""
    return np.einsum("ab,ibc,cd->iad", vectors.conj().T, inst.constraint_stack(), vectors)


def gradient_from_spectrum(
    inst: SdpInstance, values: np.ndarray, vectors: np.ndarray, T: float
) -> np.ndarray:
    x = occupation(values, T)
    traces = np.einsum("aj,iab,bj,j->i", vectors.conj(), inst.constraint_stack(), vectors, x)
    return inst.q - traces.real


def gradient(inst: SdpInstance, mu: DualLike, T: float) -> np.ndarray:
    """
    Component i is q_i - Tr[X_T(mu) Q_i]

    :raises DualInfeasible: K_mu is not strictly positive definite
    """
    _check_temperature(T)
    values, vectors = _positive_spectrum(slack_entries(inst, mu))
    return gradient_from_spectrum(inst, values, vectors, T)


def hessian_kernel(values: np.ndarray, T: float) -> np.ndarray:
    """
    w(lambda_a, lambda_b) = T(x_b - x_a)/(lambda_a - lambda_b), with
    w(lambda, lambda) = x(x+1). Near-equal pairs use a second-order expansion
    around the midpoint.
    """
    values = np.asarray(values, dtype=float)
    x = occupation(values, T)
    a = values[:, None]
    b = values[None, :]
    delta = a - b
    close = np.abs(delta) <= TAYLOR_RTOL * np.maximum(np.abs(a), np.abs(b))

    with np.errstate(divide="ignore", invalid="ignore"):
        w = T * (x[None, :] - x[:, None]) / delta

    mid = occupation(0.5 * (a + b), T)
    base = mid * (mid + 1.0)
    taylor = base * (1.0 + (6.0 * mid**2 + 6.0 * mid + 1.0) * delta**2 / (24.0 * T**2))
    return np.where(close, taylor, w)


def hessian_from_spectrum(
    inst: SdpInstance, values: np.ndarray, vectors: np.ndarray, T: float
) -> np.ndarray:
    rotated = _rotated_constraints(inst, vectors)
    w = hessian_kernel(values, T)
    h = -np.einsum("iab,jba,ab->ij", rotated, rotated, w).real / T
    return 0.5 * (h + h.T)


def hessian(inst: SdpInstance, mu: DualLike, T: float) -> np.ndarray:
    """
    The c×c Hessian of f_T, evaluated in the eigenbasis of K_mu:
    H_ij = -(1/T) sum_ab Q̃_i[a,b] Q̃_j[b,a] w(lambda_a, lambda_b).
    Negative semidefinite.

    :raises DualInfeasible: K_mu is not strictly positive definite
    """
    _check_temperature(T)
    values, vectors = _positive_spectrum(slack_entries(inst, mu))
    return hessian_from_spectrum(inst, values, vectors, T)


def constraint_norm_sum(inst: SdpInstance) -> float:
    """sum_i ||Q_i||_1 ||Q_i||"""
    return float(sum(trace_norm(m) * operator_norm(m) for m in inst.Q))


def smoothness_bound(inst: SdpInstance, lambda_min_floor: float, T: float) -> SmoothnessBound:
    """
    Worst-case occupation n̄ = 1/(e^{floor/T} - 1) and
    L_T = n̄(n̄+1)/T · sum_i ||Q_i||_1 ||Q_i||, a bound on the Hessian norm
    wherever lambda_min(K_mu) stays above the floor

    :raises ValueError: Non-positive floor
    """
    _check_temperature(T)
    if not lambda_min_floor > 0.0:
        raise ValueError(f"lambda_min floor must be positive, got {lambda_min_floor!r}")
    n_bar = float(occupation(lambda_min_floor, T))
    L_T = n_bar * (n_bar + 1.0) / T * constraint_norm_sum(inst)
    logger.debug(f"smoothness: floor {lambda_min_floor:.3e}, n̄ {n_bar:.3e}, L_T {L_T:.3e}")
    return SmoothnessBound(
        lambda_min_floor=lambda_min_floor, temperature=T, occupation=n_bar, L_T=L_T
    )


def spectral_gap_bound(T: float, lambda_min: float, gap: float, degeneracy: int, dim: int) -> float:
    """T·d0 + (d - d0)(lambda_min + Delta)/(e^{(lambda_min+Delta)/T} - 1)"""
    excited = lambda_min + gap
    tail = (dim - degeneracy) * excited * float(occupation(excited, T)) if dim > degeneracy else 0.0
    return T * degeneracy + tail


def temperature_for_precision(schedule: TemperatureSchedule) -> float:
    """
    Temperature that keeps the regularization error below epsilon.

    - entropy: epsilon / S_max
    - dimension: epsilon / d
    - spectral: min{epsilon/(2 d0), (lambda_min+Delta)/ln(1 + 2(d-d0)(lambda_min+Delta)/epsilon)}

    :raises InvalidSchedule: An entropy schedule with infinite S_max
    """
    eps = schedule.epsilon
    if schedule.mode == "entropy":
        if math.isinf(schedule.s_max):  # type: ignore[arg-type]
            raise InvalidSchedule(
                "entropy", "S_max is infinite; use the dimension schedule instead"
            )
        return eps / schedule.s_max  # type: ignore[operator]
    if schedule.mode == "dimension":
        return eps / schedule.dim  # type: ignore[operator]

    d, d0 = schedule.dim, schedule.degeneracy
    T = eps / (2.0 * d0)  # type: ignore[operator]
    if d > d0:  # type: ignore[operator]
        excited = schedule.lambda_min + schedule.gap  # type: ignore[operator]
        T = min(T, excited / math.log1p(2.0 * (d - d0) * excited / eps))  # type: ignore[operator]
    return T


def regularized_slackness(K: MatrixLike, Xop: ThermalOperator) -> tuple[np.ndarray, float]:
    """
    Per-mode residual lambda_j x_j - T x_j ln(1 + 1/x_j) of the smoothed
    complementary slackness relation, and sum_j lambda_j x_j

    :raises ValueError: K does not have the spectrum Xop was built from
    """
    values, _ = eigh(as_hermitian(K).entries)
    stored = Xop.eigenvalues
    if values.shape != stored.shape or not np.allclose(values, stored, rtol=1e-10, atol=1e-12):
        raise ValueError("K does not match the spectrum of the thermal operator")
    T = Xop.temperature
    x = Xop.occupations
    smoothing = T * (xlogy(x, x + 1.0) - xlogy(x, x))
    return stored * x - smoothing, float(np.sum(stored * x))


def trace_fixed_entropy_bound(total: float, dim: int) -> float:
    """
    d·g(N/d), the largest Bose-Einstein entropy of a d-dimensional X with
    Tr[X] = N
    """
    if total < 0.0 or dim < 1:
        raise ValueError("need total >= 0 and dim >= 1")
    return dim * float(scalar_entropy(total / dim))


def approximation_bounds(
    inst: SdpInstance,
    mu: DualLike,
    T: float,
    oracle_value: Optional[float] = None,
    tol: float = 0.0,
    grouping_tol: Optional[float] = None,
) -> ApproximationBounds:
    """
    Evaluates the entropy, dimension and spectral bounds at a (near-)optimal
    regularized dual point. With an oracle value E the slacks are

    - entropy: E >= f_T >= E - T·S_BE(X_T)
    - dimension: E <= f̃_T <= E + T·d
    - spectral: E <= f̃_T <= E + T·d0 + (d-d0)(lambda_min+Delta)/(e^{(lambda_min+Delta)/T}-1)

    each widened by ``tol``.
    """
    op = thermal_state(inst, mu, T)
    values = op.eigenvalues
    f_T = dual_objective(inst, mu, T)
    f_tilde = unregularized_energy(inst, mu, T)
    correction = T * float(np.sum(scalar_entropy(op.occupations)))
    summary = spectral_summary(op.K_spectrum.reconstruct(), grouping_tol)
    spectral = spectral_gap_bound(
        T, summary.lambda_min, summary.gap, summary.degeneracy, summary.dim
    )

    def slacks(low: float, high: float) -> dict:
        if oracle_value is None:
            return {}
        return {"lower_slack": low + tol, "upper_slack": high + tol}

    E = oracle_value if oracle_value is not None else 0.0
    checks = (
        BoundCheck(name="entropy", bound=correction, **slacks(f_T - (E - correction), E - f_T)),
        BoundCheck(name="dimension", bound=T * len(values), **slacks(f_tilde - E, E + T * len(values) - f_tilde)),
        BoundCheck(name="spectral", bound=spectral, **slacks(f_tilde - E, E + spectral - f_tilde)),
    )
    return ApproximationBounds(
        temperature=T,
        dim=len(values),
        f_T=f_T,
        f_tilde=f_tilde,
        entropy_correction=correction,
        summary=summary,
        oracle_value=oracle_value,
        checks=checks,
    )

