# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause

__version__ = "0.1.0"

from .logging_utils import logger
from .config.load_solver_config import ConfigManager, SolverSettings

# 導入 Pydantic 模型
from .models import DualPoint, OptimizerConfig, SdpInstance, TemperatureSchedule

from . import (
    linalg,
    sdp,
    thermal,
    optimize,
    qsim,
    divergence,
    utils,
    exceptions,
    config,
    models,
)
from .sdp import make_instance, oracle_solve
from .optimize import run

__all__ = [
    "linalg",
    "sdp",
    "thermal",
    "optimize",
    "qsim",
    "divergence",
    "utils",
    "exceptions",
    "config",
    "models",
    "logger",
    "ConfigManager",
    "SolverSettings",
    "DualPoint",
    "OptimizerConfig",
    "SdpInstance",
    "TemperatureSchedule",
    "make_instance",
    "oracle_solve",
    "run",
    "__version__",
]
