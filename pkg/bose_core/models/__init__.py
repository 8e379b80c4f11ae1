"""
Pydantic Models Package
bose_core 的領域模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

# 線性代數相關模型
from .linalg import EigenSystem, HermitianMatrix

# SDP 問題相關模型
from .sdp import DualPoint, SdpInstance, SpectralSummary, StateModel, StateTerm

# 熱算符相關模型
from .thermal import (
    ApproximationBounds,
    BoundCheck,
    SmoothnessBound,
    TemperatureSchedule,
    ThermalOperator,
)

# 優化器相關模型
from .optimize import (
    ErrorDecomposition,
    FinalReport,
    IterationRecord,
    OptimizerConfig,
    RunTrace,
)

# 估計器相關模型
from .qsim import EstimateReport, EstimatorBudget, RuntimePrediction, ShotOutcome

# 散度相關模型
from .divergence import AffineChannelParams, MonotonicityCheck

# 命令列相關模型
from .cli import RunConfig

# 導出所有模型
__all__ = [
    # 線性代數
    "EigenSystem",
    "HermitianMatrix",
    # SDP
    "DualPoint",
    "SdpInstance",
    "SpectralSummary",
    "StateModel",
    "StateTerm",
    # 熱算符
    "ApproximationBounds",
    "BoundCheck",
    "SmoothnessBound",
    "TemperatureSchedule",
    "ThermalOperator",
    # 優化器
    "ErrorDecomposition",
    "FinalReport",
    "IterationRecord",
    "OptimizerConfig",
    "RunTrace",
    # 估計器
    "EstimateReport",
    "EstimatorBudget",
    "RuntimePrediction",
    "ShotOutcome",
    # 散度
    "AffineChannelParams",
    "MonotonicityCheck",
    # 命令列
    "RunConfig",
]
