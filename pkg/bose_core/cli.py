# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
cli is the command-line front end: ``bose-sdp solve|oracle|bounds|estimate|divergence|budget``.

Exit codes: 0 ok, 1 acceptance or numerical failure, 2 iteration cap,
3 infeasible dual, 64 usage or input error.
"""

import argparse
import asyncio
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from . import __version__
from ._helper import (
    instance_from_json,
    json_safe,
    matrix_file_from_json,
    read_json,
    write_csv,
    write_json,
)
from ._internal_types.instance_types import ReportHeaderJson
from .config import ConfigManager, SolverSettings, get_config_from_env
from .divergence import (
    affine_monotonicity_check,
    dbe,
    dbe_spectral,
    umegaki_residual,
)
from .exceptions import (
    DualInfeasible,
    DualUnbounded,
    EmptyDualInterior,
    InstanceValidationError,
    SolverError,
)
from .logging_utils import PACKAGE_LOGGER, logger
from .models import (
    AffineChannelParams,
    EstimateReport,
    OptimizerConfig,
    RunConfig,
    RunTrace,
    SdpInstance,
    TemperatureSchedule,
)
from .optimize import TRACE_COLUMNS, run, trace_table
from .qsim import (
    cauchy_density,
    estimate_hessian_element,
    estimate_thermal_trace,
    plan_budget,
    runtime_model,
    with_shots,
)
from .sdp import decompose_state_model, lambda_min, oracle_solve, slack_entries, spectral_summary
from .setting import setup_logger
from .thermal import approximation_bounds, gradient, hessian
from .utils import random_psd, seed_stream

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_ITERATION_CAP = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64

DENSITY_POINTS = 401


class UsageError(Exception):
    """Raised for bad command-line input; maps to exit 64"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bose-sdp", description="Bose-Einstein regularized SDP solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="TOML settings file")
    parser.add_argument("-v", "--verbose", action="store_true", help="log to stderr at DEBUG")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--report", type=Path)

    def instance(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--instance", type=Path, required=True)

    def solver(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--method", choices=["ga", "newton", "sga", "snewton"], default="ga")
        sub.add_argument("--step", default="auto", help="step size or 'auto'")
        group = sub.add_mutually_exclusive_group()
        group.add_argument("--temperature", type=float)
        group.add_argument("--schedule", help="entropy:SMAX, dimension or spectral")
        sub.add_argument("--epsilon", type=float, default=0.1, help="target accuracy")
        sub.add_argument("--epsilon-step", type=float, help="per-step estimator precision")
        sub.add_argument("--max-iters", type=int, default=1000)
        sub.add_argument("--grad-tol", type=float, default=1e-8)
        sub.add_argument("--lambda-floor", type=float, default=0.01)
        sub.add_argument("--estimator", choices=["shots", "series", "exact"], default="shots")
        sub.add_argument("--budget-shots", type=int)
        sub.add_argument("--trace", type=Path)

    solve = commands.add_parser("solve", help="run an optimizer")
    instance(solve)
    solver(solve)
    common(solve)

    oracle = commands.add_parser("oracle", help="reference value of the unregularized SDP")
    instance(oracle)
    common(oracle)

    bounds = commands.add_parser("bounds", help="check the approximation bounds")
    instance(bounds)
    solver(bounds)
    common(bounds)

    estimate = commands.add_parser("estimate", help="simulated quantum estimator demo")
    instance(estimate)
    estimate.add_argument("--temperature", type=float, required=True)
    estimate.add_argument("--epsilon", type=float, default=0.1)
    estimate.add_argument("--mu", type=float, nargs="+")
    estimate.add_argument("--mode", choices=["gradient", "hessian"], default="gradient")
    estimate.add_argument("--index-i", type=int, default=0)
    estimate.add_argument("--index-j", type=int, default=0)
    estimate.add_argument("--estimator", choices=["shots", "series", "exact"], default="shots")
    estimate.add_argument("--budget-shots", type=int)
    estimate.add_argument("--h-norm", type=float, default=1.0)
    common(estimate)

    divergence = commands.add_parser("divergence", help="Bose-Einstein relative entropy")
    divergence.add_argument("--x", dest="matrix_x", type=Path)
    divergence.add_argument("--y", dest="matrix_y", type=Path)
    divergence.add_argument("--generator", choices=["random-psd", "diagonal", "equal"])
    divergence.add_argument("--dim", type=int, default=2)
    divergence.add_argument("--channel", help="attenuator:ETA:N, amplifier:G:N, additive:N or raw:A:B")
    common(divergence)

    budget = commands.add_parser("budget", help="estimator budget and runtime model")
    budget.add_argument("--temperature", type=float, required=True)
    budget.add_argument("--lambda-min", type=float, required=True)
    budget.add_argument("--epsilon", type=float, default=0.1)
    budget.add_argument("--alpha-norm", type=float, default=1.0)
    budget.add_argument("--h-norm", type=float, default=1.0)
    budget.add_argument("--mode", choices=["gradient", "hessian"], default="gradient")
    budget.add_argument("--emit-density", type=Path, help="write (t, p(t; tau)) as CSV")
    budget.add_argument("--tau", type=float, default=1.0)
    common(budget)
    return parser


def config_from_args(ns: argparse.Namespace, settings: SolverSettings) -> RunConfig:
    """
    Builds the validated RunConfig from parsed arguments

    :raises UsageError: Some argument is invalid
    """
    fields = {
        key: value
        for key, value in vars(ns).items()
        if key in RunConfig.model_fields and value is not None
    }
    if "step" in fields and fields["step"] != "auto":
        try:
            fields["step"] = float(fields["step"])
        except ValueError as e:
            raise UsageError(f"--step must be a number or 'auto', got {fields['step']!r}") from e
    fields.setdefault("seed", settings.seed)
    try:
        config = RunConfig(**fields)
    except ValidationError as e:
        raise UsageError(_validation_message(e)) from e
    if config.channel is not None:
        parse_channel(config.channel)
    return config


def _validation_message(e: ValidationError) -> str:
    parts = []
    for error in e.errors():
        where = ".".join(str(x) for x in error["loc"])
        parts.append(f"{where}: {error['msg']}" if where else error["msg"])
    return "; ".join(parts)


def parse_channel(spec: str) -> AffineChannelParams:
    """
    Parses ``attenuator:ETA:N``, ``amplifier:G:N``, ``additive:N`` or ``raw:A:B``

    :raises UsageError: Unknown channel or bad numbers
    """
    name, *raw = spec.split(":")
    try:
        values = [float(v) for v in raw]
        if name == "attenuator" and len(values) == 2:
            return AffineChannelParams.attenuator(*values)
        if name == "amplifier" and len(values) == 2:
            return AffineChannelParams.amplifier(*values)
        if name == "additive" and len(values) == 1:
            return AffineChannelParams.additive_noise(values[0])
        if name == "raw" and len(values) == 2:
            return AffineChannelParams.raw(*values)
    except (ValueError, ValidationError) as e:
        raise UsageError(f"bad channel {spec!r}: {e}") from e
    raise UsageError(f"unknown channel {spec!r}")


def report_header(config: RunConfig) -> ReportHeaderJson:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "config": config.model_dump(mode="json"),
    }


async def emit_report(config: RunConfig, payload: dict[str, Any]) -> None:
    """Writes the report file, or prints the report when no path was given"""
    report = {**report_header(config), **payload}
    if config.report is not None:
        await write_json(config.report, report)
        logger.info(f"report written to {config.report}")
    else:
        print(json.dumps(json_safe(report), indent=2, sort_keys=True, ensure_ascii=False))


async def load_instance(config: RunConfig, settings: SolverSettings) -> SdpInstance:
    """
    :raises InstanceValidationError: The file is not a valid instance
    """
    try:
        data = await read_json(config.instance)  # type: ignore[arg-type]
    except json.JSONDecodeError as e:
        raise InstanceValidationError("instance", f"malformed JSON: {e}") from e
    return instance_from_json(data, settings.hermitian_rtol)


def optimizer_config(
    config: RunConfig,
    settings: SolverSettings,
    inst: SdpInstance,
    schedule: Optional[TemperatureSchedule] = None,
) -> OptimizerConfig:
    """
    Maps the command line onto an OptimizerConfig. Without --epsilon-step the
    stochastic methods derive their per-step precision from --epsilon.
    """
    fields: dict[str, Any] = {
        "method": config.method,
        "step": config.step,
        "max_iters": config.max_iters,
        "grad_tol": config.grad_tol,
        "lambda_floor": config.lambda_floor,
        "estimator": config.estimator,
        "budget_shots": config.budget_shots,
        "seed": config.seed,
        **settings.optimizer_fields(),
    }
    if config.epsilon_step is not None:
        fields["epsilon"] = config.epsilon_step
    else:
        fields["target_accuracy"] = config.epsilon
    if config.temperature is not None:
        fields["temperature"] = config.temperature
    else:
        fields["schedule"] = schedule
    return OptimizerConfig(**fields)


def schedule_for(config: RunConfig, inst: SdpInstance) -> Optional[TemperatureSchedule]:
    """The dimension or entropy schedule; spectral needs a pilot solve first"""
    spec = config.resolved_schedule()
    if spec == "fixed":
        return None
    if spec in ("dimension", "spectral"):
        return TemperatureSchedule.dimension(inst.d, config.epsilon)
    s_max = spec.partition(":")[2]
    return TemperatureSchedule.entropy(math.inf if s_max.lower() == "inf" else float(s_max), config.epsilon)


def optional_oracle(inst: SdpInstance, settings: SolverSettings) -> Optional[float]:
    """The oracle value when it is available, None otherwise"""
    if not settings.slater_asserted:
        return None
    try:
        value, _ = oracle_solve(inst, slater_asserted=True)
    except SolverError as e:
        logger.warning(f"oracle unavailable: {e}")
        return None
    return value


def solve_instance(
    inst: SdpInstance,
    config: RunConfig,
    settings: SolverSettings,
    oracle_value: Optional[float] = None,
) -> RunTrace:
    """
    Runs the configured optimizer. A spectral schedule first solves at the
    dimension schedule, reads (lambda_min, Delta, d0) off K at the pilot
    optimum and then solves again at the spectral temperature.
    """
    schedule = schedule_for(config, inst)
    opt = optimizer_config(config, settings, inst, schedule)
    if config.resolved_schedule() != "spectral":
        return run(inst, opt, oracle_value=oracle_value)

    pilot = run(inst, opt)
    K = slack_entries(inst, np.array(pilot.final.mu_final))  # type: ignore[union-attr]
    lowest = float(np.linalg.eigvalsh(K)[0])
    summary = spectral_summary(K, grouping_tol=settings.grouping_rtol * lowest)
    logger.info(
        f"pilot solve: lambda_min={summary.lambda_min:.6g}, gap={summary.gap:.6g}, d0={summary.degeneracy}"
    )
    spectral = TemperatureSchedule.spectral(summary, config.epsilon)
    return run(inst, opt.model_copy(update={"schedule": spectral}), oracle_value=oracle_value)


async def cmd_solve(config: RunConfig, settings: SolverSettings) -> int:
    inst = await load_instance(config, settings)
    oracle_value = optional_oracle(inst, settings)
    trace = solve_instance(inst, config, settings, oracle_value)
    final = trace.final
    assert final is not None

    if config.trace is not None:
        await write_csv(config.trace, TRACE_COLUMNS, trace_table(trace))
    await emit_report(
        config,
        {
            "E_estimate": final.f_tilde,
            "E_estimate_stderr": final.f_tilde_stderr,
            "f_T": final.f_T,
            "T": final.temperature,
            "iterations": final.iterations,
            "lambda_min_final": final.lambda_min_final,
            "grad_norm_final": final.grad_norm_final,
            "mu_final": final.mu_final,
            "converged": final.converged,
            "stop_reason": final.stop_reason,
            "estimator_calls": final.estimator_calls,
            "oracle_value": final.oracle_value,
            "bound_decomposition": (
                None
                if final.decomposition is None
                else {**final.decomposition.model_dump(), "total": final.decomposition.total}
            ),
        },
    )
    return EXIT_OK if final.converged else EXIT_ITERATION_CAP


async def cmd_oracle(config: RunConfig, settings: SolverSettings) -> int:
    inst = await load_instance(config, settings)
    E, mu = oracle_solve(inst, slater_asserted=settings.slater_asserted)
    await emit_report(config, {"E": E, "mu": mu.mu.tolist()})
    return EXIT_OK


async def cmd_bounds(config: RunConfig, settings: SolverSettings) -> int:
    inst = await load_instance(config, settings)
    E, _ = oracle_solve(inst, slater_asserted=settings.slater_asserted)
    trace = solve_instance(inst, config, settings, E)
    final = trace.final
    assert final is not None
    mu = np.array(final.mu_final)
    tol = 10.0 * config.grad_tol * max(1.0, float(np.linalg.norm(mu)))
    K = slack_entries(inst, mu)
    grouping = settings.grouping_rtol * float(np.linalg.eigvalsh(K)[0])
    bounds = approximation_bounds(inst, mu, final.temperature, oracle_value=E, tol=tol, grouping_tol=grouping)
    checks = [{**c.model_dump(), "holds": c.holds} for c in bounds.checks]
    for check in bounds.checks:
        logger.info(f"{check.name} bound {check.bound:.6g}: holds={check.holds}")
    await emit_report(
        config,
        {
            "E": E,
            "T": final.temperature,
            "f_T": bounds.f_T,
            "f_tilde": bounds.f_tilde,
            "entropy_correction": bounds.entropy_correction,
            "spectral_summary": bounds.summary.model_dump(),
            "checks": checks,
            "all_hold": bounds.all_hold,
        },
    )
    return EXIT_OK if bounds.all_hold else EXIT_FAILURE


async def cmd_estimate(config: RunConfig, settings: SolverSettings) -> int:
    inst = await load_instance(config, settings)
    mu = np.zeros(inst.c) if config.mu is None else np.array(config.mu, dtype=float)
    if len(mu) != inst.c:
        raise UsageError(f"--mu needs {inst.c} values, got {len(mu)}")
    for name, index in (("--index-i", config.index_i), ("--index-j", config.index_j)):
        if index >= inst.c:
            raise UsageError(f"{name} must be below c = {inst.c}")
    T = config.temperature
    assert T is not None
    K = slack_entries(inst, mu)
    lowest = lambda_min(inst, mu)
    if lowest <= 0.0:
        raise DualInfeasible(lowest)
    series = "shots" if config.estimator == "shots" else "series"
    first = decompose_state_model(inst.Q[config.index_i], settings.psd_clip_rtol)

    if config.mode == "gradient":
        budget = plan_budget(lowest, T, config.epsilon, first.one_norm, "gradient", settings.shot_constant)
        if config.budget_shots is not None:
            budget = with_shots(budget, config.budget_shots)
        value, stderr = estimate_thermal_trace(
            K, T, first, budget, seed=config.seed, key=(config.index_i,), mode=series
        )
        exact = float(inst.q[config.index_i] - gradient(inst, mu, T)[config.index_i])
        norms = [first.one_norm]
    else:
        second = decompose_state_model(inst.Q[config.index_j], settings.psd_clip_rtol)
        alpha = first.one_norm * second.one_norm
        budget = plan_budget(
            lowest, T, config.epsilon, alpha, "hessian", settings.shot_constant, hessian_target="element"
        )
        if config.budget_shots is not None:
            budget = with_shots(budget, config.budget_shots)
        value, stderr = estimate_hessian_element(
            K,
            T,
            first,
            second,
            budget,
            seed=config.seed,
            key=(config.index_i, config.index_j),
            mode=series,
        )
        exact = float(hessian(inst, mu, T)[config.index_i, config.index_j])
        norms = [first.one_norm, second.one_norm]

    gates = runtime_model(lowest, T, config.epsilon, norms, config.h_norm, config.mode)
    report = EstimateReport(
        mode=config.mode,
        budget=budget,
        estimate=value,
        stderr=stderr,
        exact=exact,
        predicted_gates=gates.concrete,
    )
    passes = report.passes()
    logger.info(f"estimate {value:.6g} ± {stderr:.3g}, exact {exact:.6g}, passes={passes}")
    await emit_report(
        config,
        {
            "budget": budget.model_dump(),
            "estimate": value,
            "stderr": stderr,
            "exact": exact,
            "abs_error": report.abs_error,
            "predicted_gates": gates.concrete,
            "predicted_gates_asymptotic": gates.asymptotic,
            "passes": passes,
        },
    )
    return EXIT_OK if passes else EXIT_FAILURE


async def divergence_operands(config: RunConfig, settings: SolverSettings) -> tuple[np.ndarray, np.ndarray]:
    """The two matrices from files or from the named generator"""
    if config.generator is None:
        pair = []
        for field, path in (("x", config.matrix_x), ("y", config.matrix_y)):
            try:
                data = await read_json(path)  # type: ignore[arg-type]
            except json.JSONDecodeError as e:
                raise InstanceValidationError(field, f"malformed JSON: {e}") from e
            pair.append(matrix_file_from_json(data, field, settings.hermitian_rtol).entries)
        if pair[0].shape != pair[1].shape:
            raise InstanceValidationError("y", "dimension does not match x")
        return pair[0], pair[1]
    if config.generator == "diagonal":
        X = np.diag(1.0 + 2.0 * np.arange(config.dim))
        return X, 2.0 * np.eye(config.dim)
    X = random_psd(config.dim, seed_stream(config.seed, 0))
    if config.generator == "equal":
        return X, X.copy()
    return X, random_psd(config.dim, seed_stream(config.seed, 1))


async def cmd_divergence(config: RunConfig, settings: SolverSettings) -> int:
    X, Y = await divergence_operands(config, settings)
    channel = None if config.channel is None else parse_channel(config.channel)
    value = dbe(X, Y, settings.support_rtol)
    payload: dict[str, Any] = {"d_be": value, "spectral": None, "umegaki_residual": None, "channel": None}
    if math.isfinite(value):
        try:
            payload["spectral"] = dbe_spectral(X, Y, settings.support_rtol)
        except ValueError:
            logger.info("Y is singular; skipping the spectral expansion")
        payload["umegaki_residual"] = umegaki_residual(X, Y)
    if channel is not None:
        check = affine_monotonicity_check(X, Y, channel, settings.support_rtol)
        payload["channel"] = {**check.model_dump(), "monotone_condition": channel.monotone}
    await emit_report(config, payload)
    return EXIT_OK


async def cmd_budget(config: RunConfig, settings: SolverSettings) -> int:
    T, lowest = config.temperature, config.lambda_min
    assert T is not None and lowest is not None
    norms = [config.alpha_norm] if config.mode == "gradient" else [config.alpha_norm, config.alpha_norm]
    alpha = float(np.prod(norms))
    budget = plan_budget(lowest, T, config.epsilon, alpha, config.mode, settings.shot_constant)
    gates = runtime_model(lowest, T, config.epsilon, norms, config.h_norm, config.mode)
    if config.emit_density is not None:
        t = np.linspace(-10.0 * config.tau, 10.0 * config.tau, DENSITY_POINTS)
        rows = [[float(a), float(b)] for a, b in zip(t, cauchy_density(t, config.tau))]
        await write_csv(config.emit_density, ("t", "density"), rows)
    await emit_report(
        config,
        {
            "budget": budget.model_dump(),
            "total_shots": budget.total_shots,
            "predicted_gates": gates.concrete,
            "predicted_gates_asymptotic": gates.asymptotic,
        },
    )
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "bounds": cmd_bounds,
    "estimate": cmd_estimate,
    "divergence": cmd_divergence,
    "budget": cmd_budget,
}


async def load_settings(path: Optional[Path]) -> SolverSettings:
    if path is None:
        return get_config_from_env()
    if not path.is_file():
        raise UsageError(f"config file {path} does not exist")
    return await ConfigManager(path).load_config()


async def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Parses ``argv``, runs the command and maps failures onto exit codes"""
    ns = build_parser().parse_args(argv)
    try:
        settings = await load_settings(ns.config)
        setup_logger(
            PACKAGE_LOGGER,
            level=logging.DEBUG if ns.verbose else settings.log_level,
            filename=settings.log_file,
            enable_console=ns.verbose,
        )
        config = config_from_args(ns, settings)
        return await COMMANDS[config.command](config, settings)
    except (UsageError, InstanceValidationError, ValidationError) as e:
        print(f"bose-sdp: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DualInfeasible, EmptyDualInterior, DualUnbounded) as e:
        print(f"bose-sdp: infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverError as e:
        print(f"bose-sdp: solver failure: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as e:
        print(f"bose-sdp: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    return asyncio.run(run_cli(argv))


if __name__ == "__main__":
    sys.exit(main())
