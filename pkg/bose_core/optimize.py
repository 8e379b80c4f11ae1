# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
optimize contains the dual optimizers: gradient ascent, Newton's method and
their stochastic counterparts driven by the simulated quantum estimators.
All four share one loop with feasibility backtracking that keeps
lambda_min(K_mu) above the safeguard floor.
"""

import math
import time
from typing import Callable, Optional

import numpy as np
import scipy.linalg as la

from ._internal_types.instance_types import TraceRowJson
from .exceptions import SingularHessian, StepUnderflow
from .linalg import eigh
from .logging_utils import logger
from .models import (
    ErrorDecomposition,
    FinalReport,
    IterationRecord,
    OptimizerConfig,
    RunTrace,
    SdpInstance,
    StateModel,
)
from .qsim import (
    MAX_DEPTH,
    estimate_hessian_element,
    estimate_thermal_trace,
    plan_budget,
    with_shots,
)
from .sdp import decompose_state_model, find_strictly_feasible, slack_entries, spectral_summary
from .thermal import (
    dual_objective,
    gradient_from_spectrum,
    hessian,
    hessian_from_spectrum,
    log_partition_terms,
    occupation,
    scalar_entropy,
    smoothness_bound,
    spectral_gap_bound,
    temperature_for_precision,
    unregularized_energy,
)

TRACE_COLUMNS = ("iter", "f_T", "grad_norm", "lambda_min", "step", "wall_ms")
TIKHONOV_RTOL = 1e-12

Clock = Callable[[], float]


class _Point:
    """The eigendecomposition of K_mu and everything derived from it"""

    def __init__(self, inst: SdpInstance, mu: np.ndarray, T: float) -> None:
        self.mu = mu
        self.values, self.vectors = eigh(slack_entries(inst, mu))
        self.lambda_min = float(self.values[0])
        self.f_T = float(mu @ inst.q + np.sum(log_partition_terms(self.values, T)))


class _Estimators:
    """Gradient and Hessian sources for one run, with call bookkeeping"""

    def __init__(self, inst: SdpInstance, config: OptimizerConfig, T: float, epsilon: Optional[float]) -> None:
        self.inst = inst
        self.config = config
        self.T = T
        self.epsilon = epsilon
        self.calls = 0
        self.sampled = config.is_stochastic and config.estimator != "exact"
        self.models: list[StateModel] = (
            [decompose_state_model(m) for m in inst.Q] if self.sampled else []
        )

    def _budget(self, lambda_min: float, alpha: float, mode: str, shots: Optional[int]):
        budget = plan_budget(
            lambda_min,
            self.T,
            self.epsilon,  # type: ignore[arg-type]
            alpha,
            mode,  # type: ignore[arg-type]
            shot_constant=self.config.shot_constant,
            max_depth=self.config.budget_depth or MAX_DEPTH,
            hessian_target="element",
        )
        return budget if shots is None else with_shots(budget, shots)

    def gradient(self, iteration: int, point: _Point) -> np.ndarray:
        if self.config.is_stochastic:
            self.calls += self.inst.c
        if not self.sampled:
            return gradient_from_spectrum(self.inst, point.values, point.vectors, self.T)
        K = slack_entries(self.inst, point.mu)
        traces = np.empty(self.inst.c)
        for i, model in enumerate(self.models):
            budget = self._budget(point.lambda_min, model.one_norm, "gradient", self.config.budget_shots)
            traces[i], _ = estimate_thermal_trace(
                K,
                self.T,
                model,
                budget,
                seed=self.config.seed,
                key=(iteration, 0, i),
                mode="series" if self.config.estimator == "series" else "shots",
            )
        return self.inst.q - traces

    def hessian(self, iteration: int, point: _Point) -> tuple[np.ndarray, float]:
        """Returns the Hessian and the size of its statistical uncertainty"""
        if self.config.is_stochastic:
            self.calls += self.inst.c**2
        if not self.sampled:
            return hessian_from_spectrum(self.inst, point.values, point.vectors, self.T), 0.0
        K = slack_entries(self.inst, point.mu)
        c = self.inst.c
        estimate = np.empty((c, c))
        errors = np.empty((c, c))
        for i in range(c):
            for j in range(c):
                alpha = self.models[i].one_norm * self.models[j].one_norm
                budget = self._budget(point.lambda_min, alpha, "hessian", self.config.budget_shots)
                estimate[i, j], errors[i, j] = estimate_hessian_element(
                    K,
                    self.T,
                    self.models[i],
                    self.models[j],
                    budget,
                    seed=self.config.seed,
                    key=(iteration, 1, i, j),
                    mode="series" if self.config.estimator == "series" else "shots",
                )
        return 0.5 * (estimate + estimate.T), float(np.linalg.norm(errors))

    def energy(self, iteration: int, point: _Point) -> tuple[float, float]:
        """
        Estimate of f̃_T(mu) = mu·q + Tr[K_mu X_T(mu)] and its standard error.
        Sampled runs estimate the trace through the state model of K_mu.
        """
        if not self.sampled:
            return unregularized_energy(self.inst, point.mu, self.T), 0.0
        K = slack_entries(self.inst, point.mu)
        model = decompose_state_model(K)
        self.calls += 1
        shots = self.config.final_shots if self.config.final_shots is not None else self.config.budget_shots
        budget = self._budget(point.lambda_min, model.one_norm, "gradient", shots)
        trace, error = estimate_thermal_trace(
            K,
            self.T,
            model,
            budget,
            seed=self.config.seed,
            key=(iteration, 2),
            mode="series" if self.config.estimator == "series" else "shots",
        )
        return float(point.mu @ self.inst.q) + trace, error


def resolve_temperature(config: OptimizerConfig) -> float:
    """The fixed temperature, or the one the schedule prescribes"""
    if config.temperature is not None:
        return config.temperature
    return temperature_for_precision(config.schedule)  # type: ignore[arg-type]


def step_precision(inst: SdpInstance, config: OptimizerConfig, L_T: float) -> Optional[float]:
    """
    Per-step estimator precision: the explicit epsilon, or
    C·sqrt(L_T·delta/c) from the target accuracy delta
    """
    if config.epsilon is not None:
        return config.epsilon
    if config.target_accuracy is None:
        return None
    return config.precision_constant * math.sqrt(L_T * config.target_accuracy / inst.c)


def newton_direction(hess: np.ndarray, grad: np.ndarray) -> tuple[np.ndarray, float]:
    """
    Solves hess·Λ = grad for a negative definite hess through a Cholesky
    factorization of -hess; a Tikhonov shift of 1e-12·||hess|| is applied when
    the factorization fails. Returns -Λ, the ascent direction, and the shift.

    :raises SingularHessian: Still singular after the shift
    """
    scale = float(np.linalg.norm(hess, 2)) if hess.size else 0.0
    if scale == 0.0:
        raise SingularHessian(0.0)
    shift = 0.0
    try:
        factor = la.cho_factor(-hess, check_finite=False)
    except la.LinAlgError:
        shift = TIKHONOV_RTOL * scale
        try:
            factor = la.cho_factor(-hess + shift * np.eye(len(hess)), check_finite=False)
        except la.LinAlgError as e:
            raise SingularHessian(shift) from e
    return la.cho_solve(factor, grad, check_finite=False), shift


def _backtrack(
    inst: SdpInstance,
    point: _Point,
    direction: np.ndarray,
    step: float,
    floor: float,
    T: float,
    max_halvings: int,
) -> tuple[_Point, float, int]:
    for halvings in range(max_halvings + 1):
        trial = _Point(inst, point.mu + step * direction, T)
        if trial.lambda_min >= floor:
            return trial, step, halvings
        step *= 0.5
    raise StepUnderflow(max_halvings, floor)


def _run(
    inst: SdpInstance,
    config: OptimizerConfig,
    clock: Clock,
    oracle_value: Optional[float],
) -> RunTrace:
    T = resolve_temperature(config)
    floor = config.lambda_floor
    smooth = smoothness_bound(inst, floor, T)
    newton_like = config.method in ("newton", "snewton")
    if config.step == "auto":
        eta = 1.0 if newton_like else smooth.step
    else:
        eta = float(config.step)
    epsilon = step_precision(inst, config, smooth.L_T)
    sources = _Estimators(inst, config, T, epsilon)
    logger.info(
        f"{config.method}: T={T:.6g}, eta={eta:.6g}, L_T={smooth.L_T:.6g}, epsilon_j={epsilon}"
    )

    start = find_strictly_feasible(inst, margin=floor, max_iters=config.phase1_max_iters)
    point = _Point(inst, start.mu.copy(), T)
    started = clock()

    def wall() -> float:
        return (clock() - started) * 1000.0 if config.record_wall_time else 0.0

    records: list[IterationRecord] = []
    iteration = 0
    grad = sources.gradient(iteration, point)
    records.append(
        IterationRecord(
            iteration=0,
            mu=point.mu.tolist(),
            f_T=point.f_T,
            grad_norm=float(np.linalg.norm(grad)),
            lambda_min=point.lambda_min,
            step=0.0,
            wall_ms=wall(),
        )
    )

    stop = "max_iters"
    while True:
        grad_norm = float(np.linalg.norm(grad))
        if not config.is_stochastic and grad_norm <= config.grad_tol:
            stop = "tolerance"
            break
        if iteration >= config.max_iters:
            break

        shift = 0.0
        fallback = False
        if not newton_like:
            direction, step = grad, eta
        elif not sources.sampled:
            hess, _ = sources.hessian(iteration, point)
            direction, shift = newton_direction(hess, grad)
            step = eta
        else:
            hess, spread = sources.hessian(iteration, point)
            top = float(la.eigvalsh(hess)[-1])
            margin = max(spread, TIKHONOV_RTOL * float(np.linalg.norm(hess, 2)))
            shift = max(0.0, top + margin)
            if shift > config.shift_cap or margin == 0.0:
                logger.warning(f"iteration {iteration}: Hessian shift {shift:.3e} beyond cap, taking a gradient step")
                direction, step, fallback = grad, smooth.step, True
            else:
                shifted = hess - shift * np.eye(inst.c)
                direction = la.solve(-shifted, grad, assume_a="pos", check_finite=False)
                step = eta

        point, taken, halvings = _backtrack(
            inst, point, direction, step, floor, T, config.max_halvings
        )
        if halvings > config.max_halvings // 2:
            logger.warning(f"iteration {iteration}: {halvings} halvings to stay above the floor")
        iteration += 1
        grad = sources.gradient(iteration, point)
        records.append(
            IterationRecord(
                iteration=iteration,
                mu=point.mu.tolist(),
                f_T=point.f_T,
                grad_norm=float(np.linalg.norm(grad)),
                lambda_min=point.lambda_min,
                step=taken,
                wall_ms=wall(),
                halvings=halvings,
                hessian_shift=shift,
                fallback=fallback,
            )
        )
        logger.debug(
            f"iteration {iteration}: f_T={point.f_T:.12g}, |g|={records[-1].grad_norm:.3e}, "
            f"lambda_min={point.lambda_min:.3e}"
        )

    f_tilde, f_tilde_err = sources.energy(iteration, point)
    final_grad = records[-1].grad_norm
    converged = stop == "tolerance" or config.is_stochastic
    decomposition = error_decomposition(
        inst,
        point.mu,
        T,
        config,
        f_tilde=f_tilde,
        grad_norm=final_grad,
        oracle_value=oracle_value,
        estimate_stderr=f_tilde_err,
    )
    final = FinalReport(
        mu_final=point.mu.tolist(),
        f_tilde=f_tilde,
        f_T=point.f_T,
        temperature=T,
        iterations=iteration,
        lambda_min_final=point.lambda_min,
        grad_norm_final=final_grad,
        converged=converged,
        stop_reason=stop,  # type: ignore[arg-type]
        f_tilde_stderr=f_tilde_err,
        estimator_calls=sources.calls,
        oracle_value=oracle_value,
        oracle_gap=None if oracle_value is None else f_tilde - oracle_value,
        decomposition=decomposition,
    )
    logger.info(
        f"{config.method} finished after {iteration} iterations ({stop}): f̃_T={f_tilde:.12g}"
    )
    return RunTrace(method=config.method, records=records, final=final)


def gradient_ascent(
    inst: SdpInstance,
    config: OptimizerConfig,
    clock: Clock = time.perf_counter,
    oracle_value: Optional[float] = None,
) -> RunTrace:
    """
    Gradient ascent mu <- mu + eta·grad f_T(mu), halving the step whenever the
    trial point drops lambda_min(K_mu) below the safeguard floor. Stops on the
    gradient tolerance or after ``max_iters`` steps and reports f̃_T(mu_final).

    Example:

    .. code:: python

        config = OptimizerConfig(method="ga", temperature=0.05)
        trace = bose_core.optimize.gradient_ascent(bose_core.utils.inst_a(), config)
        print(trace.final.f_tilde)

    :raises EmptyDualInterior: No strictly feasible start exists
    :raises StepUnderflow: No step keeps lambda_min above the floor
    """
    return _run(inst, config.model_copy(update={"method": "ga"}), clock, oracle_value)


def newton(
    inst: SdpInstance,
    config: OptimizerConfig,
    clock: Clock = time.perf_counter,
    oracle_value: Optional[float] = None,
) -> RunTrace:
    """
    Newton's method mu <- mu - eta·[Hess f_T]^{-1} grad f_T with the same
    feasibility backtracking. The step defaults to 1.

    :raises SingularHessian: The Hessian stays singular after the Tikhonov shift
    """
    return _run(inst, config.model_copy(update={"method": "newton"}), clock, oracle_value)


def stochastic_gradient_ascent(
    inst: SdpInstance,
    config: OptimizerConfig,
    clock: Clock = time.perf_counter,
    oracle_value: Optional[float] = None,
) -> RunTrace:
    """
    Gradient ascent with every component q_i - Tr[X_T Q_i] estimated by
    :func:`~bose_core.qsim.estimate_thermal_trace` at precision epsilon_j.
    Runs exactly ``max_iters`` steps and estimates f̃_T(mu_J) = mu_J·q + Tr[K X_T(mu_J)] at the end.
    With ``estimator="exact"`` the trace equals the one of
    :func:`gradient_ascent`.

    :raises BudgetInfeasible: lambda_min collapsed so far that the series depth explodes
    """
    return _run(inst, config.model_copy(update={"method": "sga"}), clock, oracle_value)


def stochastic_newton(
    inst: SdpInstance,
    config: OptimizerConfig,
    clock: Clock = time.perf_counter,
    oracle_value: Optional[float] = None,
) -> RunTrace:
    """
    Newton's method with estimated gradient and Hessian. The estimated Hessian
    is symmetrized and shifted by its largest eigenvalue plus its standard
    error so that it is negative definite; a shift beyond ``shift_cap`` turns
    the iteration into a gradient step of size 1/L_T. Each iteration makes c
    gradient and c² Hessian estimator calls.
    """
    return _run(inst, config.model_copy(update={"method": "snewton"}), clock, oracle_value)


SOLVERS = {
    "ga": gradient_ascent,
    "newton": newton,
    "sga": stochastic_gradient_ascent,
    "snewton": stochastic_newton,
}


def run(
    inst: SdpInstance,
    config: OptimizerConfig,
    clock: Clock = time.perf_counter,
    oracle_value: Optional[float] = None,
) -> RunTrace:
    """Dispatches on ``config.method``"""
    return SOLVERS[config.method](inst, config, clock, oracle_value)


def approximation_error_bound(inst: SdpInstance, config: OptimizerConfig, mu: np.ndarray, T: float) -> float:
    """
    The regularization error the active schedule guarantees: T·S_max,
    T·d or the spectral-gap bound. A fixed temperature falls back to T·d.
    """
    schedule = config.schedule
    if schedule is None or schedule.mode == "dimension":
        return T * inst.d
    if schedule.mode == "entropy":
        return T * schedule.s_max  # type: ignore[operator]
    summary = spectral_summary(slack_entries(inst, mu))
    return spectral_gap_bound(T, summary.lambda_min, summary.gap, summary.degeneracy, summary.dim)


def error_decomposition(
    inst: SdpInstance,
    mu: np.ndarray,
    T: float,
    config: OptimizerConfig,
    f_tilde: float,
    grad_norm: float,
    oracle_value: Optional[float] = None,
    estimate_stderr: float = 0.0,
) -> ErrorDecomposition:
    """
    Splits |f̃_T(mu_J) - E| into the entropy correction T·S_BE(X_T(mu_J)), a
    dual suboptimality bound ||g||²/(2m) with m the smallest curvature of
    -f_T at mu_J, the schedule's approximation bound and, for stochastic
    runs, three standard errors of the final estimate.
    """
    values, _ = eigh(slack_entries(inst, mu))
    correction = T * float(np.sum(scalar_entropy(occupation(values, T))))
    curvature = float(la.eigvalsh(-hessian(inst, mu, T))[0])
    if grad_norm == 0.0:
        suboptimality = 0.0
    elif curvature > 0.0:
        suboptimality = grad_norm**2 / (2.0 * curvature)
    else:
        suboptimality = math.inf
    return ErrorDecomposition(
        entropy_correction=correction,
        dual_suboptimality=suboptimality,
        approximation=approximation_error_bound(inst, config, mu, T),
        estimation=3.0 * estimate_stderr,
        measured_gap=None if oracle_value is None else abs(f_tilde - oracle_value),
    )


def trace_rows(trace: RunTrace) -> list[TraceRowJson]:
    """One row per iteration in the fixed CSV column order"""
    return [
        {
            "iter": r.iteration,
            "f_T": r.f_T,
            "grad_norm": r.grad_norm,
            "lambda_min": r.lambda_min,
            "step": r.step,
            "wall_ms": r.wall_ms,
        }
        for r in trace.records
    ]


def trace_table(trace: RunTrace) -> list[list]:
    return [[row[c] for c in TRACE_COLUMNS] for row in trace_rows(trace)]  # type: ignore[literal-required]


def check_monotone(trace: RunTrace, tol: float = 1e-12) -> bool:
    """True when f_T never drops by more than ``tol`` between accepted iterates"""
    values = [r.f_T for r in trace.records]
    return all(b >= a - tol for a, b in zip(values, values[1:]))


def objective_at(inst: SdpInstance, trace: RunTrace) -> float:
    """f_T at the final point, recomputed"""
    return dual_objective(inst, trace.final.mu_final, trace.final.temperature)  # type: ignore[union-attr]
