# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
qsim simulates the quantum estimators classically. Circuits are never run as
state vectors: a Hadamard-test shot is a Bernoulli draw with
P(z = +1) = (1 + <Z>)/2, where <Z> comes from the closed-form trace.
"""

import math
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.special import exprel

from .exceptions import BudgetInfeasible, DualInfeasible, InvalidDensityMatrix
from .linalg import MatrixLike, as_array, eigh, hermitian_residual
from .logging_utils import logger
from .models import EstimatorBudget, RuntimePrediction, ShotOutcome, StateModel
from .utils import seed_stream

MAX_DEPTH = 100_000
SHOT_CONSTANT = 9.0
DENSITY_TOL = 1e-10

SeriesMode = Literal["shots", "series"]
HessianTarget = Literal["series", "element"]


def cauchy_from_uniform(u: float, tau: float) -> float:
    """tau·tan(pi(u - 1/2)), the Cauchy quantile function"""
    return tau * math.tan(math.pi * (u - 0.5))


def sample_cauchy(
    tau: float, stream: np.random.Generator, size: Optional[int] = None
) -> float | np.ndarray:
    """
    Draws from the Cauchy distribution with scale ``tau`` by inverting its CDF.
    For K ≻ 0 the average of e^{-itK} over these draws is e^{-tau K}.

    :raises ValueError: tau is not positive
    """
    if not tau > 0.0:
        raise ValueError(f"Cauchy scale must be positive, got {tau!r}")
    u = stream.random(size)
    t = tau * np.tan(np.pi * (u - 0.5))
    return float(t) if size is None else t


def cauchy_density(t: float | np.ndarray, tau: float) -> float | np.ndarray:
    """p(t; tau) = tau / (pi (t² + tau²))"""
    value = tau / (np.pi * (np.asarray(t, dtype=float) ** 2 + tau**2))
    return float(value) if np.ndim(value) == 0 else value


def sample_truncated_cauchy(
    tau: np.ndarray | float, t_max: float, stream: np.random.Generator, size: int
) -> np.ndarray:
    """
    Cauchy draws restricted to [-t_max, t_max] by redrawing the ones that fall
    outside. ``tau`` may be a scalar or one scale per draw; a zero scale gives 0.
    """
    scales = np.broadcast_to(np.asarray(tau, dtype=float), (size,))
    t = scales * np.tan(np.pi * (stream.random(size) - 0.5))
    outside = np.abs(t) > t_max
    while np.any(outside):
        count = int(outside.sum())
        t[outside] = scales[outside] * np.tan(np.pi * (stream.random(count) - 0.5))
        outside = np.abs(t) > t_max
    return t


def check_density_matrix(rho: MatrixLike, tol: float = DENSITY_TOL) -> np.ndarray:
    """
    Returns the entries of ``rho`` after checking it is a density matrix

    :raises InvalidDensityMatrix: Not Hermitian, not unit trace or not PSD
    """
    array = as_array(rho)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise InvalidDensityMatrix(f"shape {array.shape} is not square")
    if hermitian_residual(array) > tol:
        raise InvalidDensityMatrix("not Hermitian")
    trace = np.trace(array).real
    if abs(trace - 1.0) > tol:
        raise InvalidDensityMatrix(f"trace {trace:.12g} is not 1")
    if eigh(0.5 * (array + array.conj().T))[0][0] < -tol:
        raise InvalidDensityMatrix("not positive semidefinite")
    return array


def hadamard_expectation(rho: MatrixLike, K: MatrixLike, t: float) -> float:
    """
    <Z> of the Hadamard test on rho with U = e^{-itK}: Re Tr[rho e^{-itK}]

    :raises InvalidDensityMatrix: rho is not a density matrix
    """
    state = check_density_matrix(rho)
    values, vectors = eigh(as_array(K))
    diagonal = np.einsum("aj,ab,bj->j", vectors.conj(), state, vectors).real
    return float(np.sum(diagonal * np.cos(t * values)))


def swap_hadamard_expectation(
    rho: MatrixLike, sigma: MatrixLike, K: MatrixLike, t1: float, t2: float
) -> float:
    """
    <Z> of the controlled-SWAP Hadamard test: Re Tr[U1 rho U2 sigma] with
    U_i = e^{-i t_i K}

    :raises InvalidDensityMatrix: rho or sigma is not a density matrix
    """
    first = check_density_matrix(rho)
    second = check_density_matrix(sigma)
    values, vectors = eigh(as_array(K))
    r = vectors.conj().T @ first @ vectors
    s = vectors.conj().T @ second @ vectors
    p1 = np.exp(-1j * t1 * values)
    p2 = np.exp(-1j * t2 * values)
    return float(np.einsum("a,ab,b,ba->", p1, r, p2, s).real)


def _depth(raw: float, limit: int) -> int:
    if not math.isfinite(raw) or raw > limit:
        raise BudgetInfeasible(raw, limit)
    return max(1, math.ceil(raw))


def plan_budget(
    lambda_min: float,
    T: float,
    epsilon: float,
    alpha_norm: float,
    mode: Literal["gradient", "hessian"] = "gradient",
    shot_constant: float = SHOT_CONSTANT,
    max_depth: int = MAX_DEPTH,
    hessian_target: HessianTarget = "series",
) -> EstimatorBudget:
    """
    Splits epsilon into equal series, tail and statistical thirds and returns
    the truncation depth, time cut-offs and shot counts.

    gradient mode:

    - M = ceil((T/lambda_min)·ln(3α/(epsilon(1 - e^{-lambda_min/T}))) - 1), at least 1
    - t_max(m) = 6·α·m·M/(pi·T·epsilon)
    - N(m) = ceil(9·M²·α²/epsilon²)

    hessian mode (α is the product of the two weight norms). With
    ``hessian_target="series"`` epsilon bounds the error of the double series
    sum S, the Hessian element being -S/T; with ``"element"`` the plan runs at
    p = epsilon·T so the element itself is accurate to epsilon. With p the
    planning precision:

    - M = ceil((T/lambda_min)·ln(6·α·e^{lambda_min/T}/(p·(1 - e^{-lambda_min/T})²))), at least 1
    - t_max(m1, m2) = 6·α·(m1 + m2)·M²/(pi·T·p)
    - N(m1, m2) = ceil(9·M⁴·α²/p²)

    :raises ValueError: Some input is not positive
    :raises BudgetInfeasible: The depth exceeds ``max_depth``
    """
    for name, value in (("lambda_min", lambda_min), ("T", T), ("epsilon", epsilon), ("alpha_norm", alpha_norm)):
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    ratio = lambda_min / T
    damping = -math.expm1(-ratio)

    if mode == "gradient":
        raw = (T / lambda_min) * math.log(3.0 * alpha_norm / (epsilon * damping)) - 1.0
        M = _depth(raw, max_depth)
        t_max = [6.0 * alpha_norm * m * M / (math.pi * T * epsilon) for m in range(1, M + 1)]
        n = math.ceil(shot_constant * M**2 * alpha_norm**2 / epsilon**2)
        shots = [n] * M
    else:
        target = epsilon * T if hessian_target == "element" else epsilon
        log_arg = 6.0 * alpha_norm / (target * damping**2)
        raw = (T / lambda_min) * (math.log(log_arg) + ratio) if log_arg > 0 else math.inf
        M = _depth(raw, max_depth)
        t_max = [
            6.0 * alpha_norm * total * M**2 / (math.pi * T * target)
            for total in range(2, 2 * M + 1)
        ]
        n = math.ceil(shot_constant * M**4 * alpha_norm**2 / target**2)
        shots = [n] * (M * M)

    logger.debug(f"{mode} budget: M={M}, N={n}, t_max[-1]={t_max[-1]:.3e}")
    return EstimatorBudget(
        mode=mode,
        depth=M,
        t_max=t_max,
        shots=shots,
        epsilon=epsilon,
        alpha_norm=alpha_norm,
        temperature=T,
        lambda_min=lambda_min,
    )


def with_shots(budget: EstimatorBudget, shots: int) -> EstimatorBudget:
    """The same budget with every shot count replaced by ``shots``"""
    return budget.model_copy(update={"shots": [shots] * len(budget.shots)})


def _positive_spectrum(K: MatrixLike) -> tuple[np.ndarray, np.ndarray]:
    values, vectors = eigh(as_array(K))
    if values[0] <= 0.0:
        raise DualInfeasible(float(values[0]))
    return values, vectors


def _rotated_states(model: StateModel, vectors: np.ndarray) -> np.ndarray:
    return np.einsum("ab,kbc,cd->kad", vectors.conj().T, model.states(), vectors)


def _term_choice(model: StateModel) -> tuple[np.ndarray, np.ndarray]:
    weights = model.weights
    return np.abs(weights) / model.one_norm, np.sign(weights)


def estimate_thermal_trace(
    K: MatrixLike,
    T: float,
    Q_model: StateModel,
    budget: EstimatorBudget,
    seed: int = 0,
    key: Sequence[int] = (),
    mode: SeriesMode = "shots",
) -> tuple[float, float]:
    """
    Estimates Tr[X_T Q] for Q = sum_k α_k rho_k. For every m = 1..M it draws
    N(m) pairs (t, k), t from the Cauchy distribution with scale m/T truncated
    at t_max(m) and k with probability |α_k|/||α||_1, simulates one
    Hadamard-test shot per pair and averages the shots weighted by
    ||α||_1·sgn(α_k). The per-m means are summed.

    Term m draws from the stream (seed, *key, m), so the result depends on
    (budget, seed, key) only. ``mode="series"`` replaces the sampling by the
    exact truncated series sum_{m<=M} Tr[Q e^{-mK/T}] with zero error.

    :raises DualInfeasible: K is not strictly positive definite
    :returns: (estimate, standard error)
    """
    if budget.mode != "gradient":
        raise ValueError("estimate_thermal_trace needs a gradient budget")
    values, vectors = _positive_spectrum(K)
    diagonals = np.einsum("kjj->kj", _rotated_states(Q_model, vectors)).real
    weights = Q_model.weights
    M = budget.depth

    if mode == "series":
        m = np.arange(1, M + 1)[:, None]
        decay = np.exp(-m * values[None, :] / T)
        return float(np.einsum("k,kj,mj->", weights, diagonals, decay)), 0.0

    probabilities, signs = _term_choice(Q_model)
    norm = Q_model.one_norm
    estimate = 0.0
    variance = 0.0
    for m in range(1, M + 1):
        rng = seed_stream(seed, *key, m)
        n = budget.shots_for(m)
        t = sample_truncated_cauchy(m / T, budget.cutoff(m), rng, n)
        k = rng.choice(len(weights), size=n, p=probabilities)
        expectation = np.einsum("nj,nj->n", diagonals[k], np.cos(np.outer(t, values)))
        z = np.where(rng.random(n) < 0.5 * (1.0 + expectation), 1.0, -1.0)
        samples = norm * signs[k] * z
        estimate += float(samples.mean())
        variance += float(samples.var(ddof=1)) / n if n > 1 else norm**2 / n
    return estimate, math.sqrt(variance)


def _pair_integral(A: np.ndarray, B: np.ndarray, m1: int, m2: int) -> np.ndarray:
    """int_0^1 e^{-(m1-s)A - (m2-1+s)B} ds elementwise"""
    start = m1 * A + (m2 - 1) * B
    end = (m1 - 1) * A + m2 * B
    return np.exp(-np.minimum(start, end)) * exprel(-np.abs(A - B))


def estimate_hessian_element(
    K: MatrixLike,
    T: float,
    Q_i_model: StateModel,
    Q_j_model: StateModel,
    budget: EstimatorBudget,
    seed: int = 0,
    key: Sequence[int] = (),
    mode: SeriesMode = "shots",
) -> tuple[float, float]:
    """
    Estimates the Hessian entry -(1/T) int_0^1 ds Tr[X_T(s) Q_i X_T(1-s) Q_j]
    from its double geometric series. For every (m1, m2) each shot draws s
    uniformly, t1 and t2 from Cauchy distributions with scales (m1 - s)/T and
    (m2 - 1 + s)/T, indices k and l from the two weight distributions, and
    simulates one controlled-SWAP Hadamard-test shot weighted by
    ||α_i||_1·||α_j||_1·sgn(α_{i,k} α_{j,l}).

    :raises DualInfeasible: K is not strictly positive definite
    :returns: (estimate, standard error)
    """
    if budget.mode != "hessian":
        raise ValueError("estimate_hessian_element needs a hessian budget")
    values, vectors = _positive_spectrum(K)
    first = _rotated_states(Q_i_model, vectors)
    second = _rotated_states(Q_j_model, vectors)
    M = budget.depth

    if mode == "series":
        A = values[:, None] / T
        B = values[None, :] / T
        overlap = np.einsum(
            "k,l,kab,lba->ab", Q_i_model.weights, Q_j_model.weights, first, second
        )
        total = 0.0
        for m1 in range(1, M + 1):
            for m2 in range(1, M + 1):
                total += float(np.sum(overlap * _pair_integral(A, B, m1, m2)).real)
        return -total / T, 0.0

    p_i, s_i = _term_choice(Q_i_model)
    p_j, s_j = _term_choice(Q_j_model)
    norm = Q_i_model.one_norm * Q_j_model.one_norm
    estimate = 0.0
    variance = 0.0
    for m1 in range(1, M + 1):
        for m2 in range(1, M + 1):
            rng = seed_stream(seed, *key, m1, m2)
            n = budget.shots_for(m1, m2)
            s = rng.random(n)
            cutoff = budget.cutoff(m1, m2)
            t1 = sample_truncated_cauchy((m1 - s) / T, cutoff, rng, n)
            t2 = sample_truncated_cauchy((m2 - 1 + s) / T, cutoff, rng, n)
            k = rng.choice(len(p_i), size=n, p=p_i)
            l = rng.choice(len(p_j), size=n, p=p_j)  # noqa: E741
            phase1 = np.exp(-1j * np.outer(t1, values))
            phase2 = np.exp(-1j * np.outer(t2, values))
            expectation = np.einsum(
                "na,nab,nb,nba->n", phase1, first[k], phase2, second[l]
            ).real
            z = np.where(rng.random(n) < 0.5 * (1.0 + expectation), 1.0, -1.0)
            samples = norm * s_i[k] * s_j[l] * z
            estimate += float(samples.mean())
            variance += float(samples.var(ddof=1)) / n if n > 1 else norm**2 / n
    return -estimate / T, math.sqrt(variance) / T


def sample_gradient_shot(
    K: MatrixLike, T: float, model: StateModel, m: int, t_max: float, stream: np.random.Generator
) -> ShotOutcome:
    """One weighted Hadamard-test shot for series term m"""
    probabilities, signs = _term_choice(model)
    t = float(sample_truncated_cauchy(m / T, t_max, stream, 1)[0])
    k = int(stream.choice(len(probabilities), p=probabilities))
    expectation = hadamard_expectation(model.terms[k].state, K, t)
    z = 1 if stream.random() < 0.5 * (1.0 + expectation) else -1
    return ShotOutcome(z=z, weight=model.one_norm * float(signs[k]), m=m, t=t, k=k)


def sample_hessian_shot(
    K: MatrixLike,
    T: float,
    model_i: StateModel,
    model_j: StateModel,
    m1: int,
    m2: int,
    t_max: float,
    stream: np.random.Generator,
) -> ShotOutcome:
    """One weighted controlled-SWAP shot for series term (m1, m2)"""
    p_i, s_i = _term_choice(model_i)
    p_j, s_j = _term_choice(model_j)
    s = float(stream.random())
    t1 = float(sample_truncated_cauchy((m1 - s) / T, t_max, stream, 1)[0])
    t2 = float(sample_truncated_cauchy((m2 - 1 + s) / T, t_max, stream, 1)[0])
    k = int(stream.choice(len(p_i), p=p_i))
    l = int(stream.choice(len(p_j), p=p_j))  # noqa: E741
    expectation = swap_hadamard_expectation(
        model_i.terms[k].state, model_j.terms[l].state, K, t1, t2
    )
    z = 1 if stream.random() < 0.5 * (1.0 + expectation) else -1
    weight = model_i.one_norm * model_j.one_norm * float(s_i[k] * s_j[l])
    return ShotOutcome(z=z, weight=weight, m=m1, t=t1, k=k, m2=m2, s=s, t2=t2, l=l)


def runtime_model(
    lambda_min: float,
    T: float,
    epsilon: float,
    alpha_norms: Sequence[float],
    h_norm: float,
    mode: Literal["gradient", "hessian", "end_to_end"] = "gradient",
    constraints: Optional[int] = None,
    mu_norm: Optional[float] = None,
    L_T: Optional[float] = None,
    delta: Optional[float] = None,
) -> RuntimePrediction:
    """
    Predicted gate counts.

    - gradient: sum_m N(m)·ceil(||h||_1·t_max(m)) from the planned budget, and
      the asymptotic ||α||³·||h||_1·T⁴/(lambda_min⁵·epsilon³)
    - hessian: the same over the (m1, m2) grid, and
      (||α_i||·||α_j||)³·||h||_1·T⁸/(lambda_min⁹·epsilon³)
    - end_to_end: c^{5/2}·||mu*||²·||α||³·||h||_1·T⁴/(lambda_min⁵·L_T^{1/2}·delta^{5/2})

    :raises ValueError: Missing or non-positive inputs
    """
    if not alpha_norms:
        raise ValueError("alpha_norms must not be empty")
    for name, value in (("lambda_min", lambda_min), ("T", T), ("h_norm", h_norm)):
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    alpha = float(np.prod(alpha_norms))

    if mode == "end_to_end":
        if constraints is None or mu_norm is None or L_T is None or delta is None:
            raise ValueError("end_to_end needs constraints, mu_norm, L_T and delta")
        if not (L_T > 0.0 and delta > 0.0):
            raise ValueError("L_T and delta must be positive")
        value = (
            constraints**2.5
            * mu_norm**2
            * alpha**3
            * h_norm
            * T**4
            / (lambda_min**5 * math.sqrt(L_T) * delta**2.5)
        )
        return RuntimePrediction(mode=mode, asymptotic=value)

    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    budget = plan_budget(lambda_min, T, epsilon, alpha, mode)
    if mode == "gradient":
        concrete = sum(
            budget.shots_for(m) * math.ceil(h_norm * budget.cutoff(m))
            for m in range(1, budget.depth + 1)
        )
        asymptotic = alpha**3 * h_norm * T**4 / (lambda_min**5 * epsilon**3)
    else:
        concrete = sum(
            budget.shots_for(m1, m2) * math.ceil(h_norm * budget.cutoff(m1, m2))
            for m1 in range(1, budget.depth + 1)
            for m2 in range(1, budget.depth + 1)
        )
        asymptotic = alpha**3 * h_norm * T**8 / (lambda_min**9 * epsilon**3)
    return RuntimePrediction(mode=mode, asymptotic=asymptotic, concrete=concrete)
