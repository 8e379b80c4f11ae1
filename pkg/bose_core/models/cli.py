"""
命令列設定模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .optimize import EstimatorMode, Method

Command = Literal["solve", "oracle", "bounds", "estimate", "divergence", "budget"]

NEEDS_INSTANCE = ("solve", "oracle", "bounds", "estimate")


class RunConfig(BaseModel):
    """Everything one CLI invocation needs, echoed into its JSON report"""

    model_config = ConfigDict(extra="forbid")

    command: Command = Field(..., description="子命令")
    instance: Optional[Path] = Field(default=None, description="實例 JSON 路徑")
    method: Method = Field(default="ga", description="優化方法")
    step: Union[float, Literal["auto"]] = Field(default="auto", description="步長")
    temperature: Optional[float] = Field(default=None, gt=0.0, description="固定溫度")
    schedule: Optional[str] = Field(default=None, description="entropy:SMAX、dimension 或 spectral")
    epsilon: float = Field(default=0.1, gt=0.0, description="目標精度")
    epsilon_step: Optional[float] = Field(default=None, gt=0.0, description="每步估計精度")
    max_iters: int = Field(default=1000, gt=0, description="最大迭代次數")
    grad_tol: float = Field(default=1e-8, gt=0.0, description="梯度容差")
    lambda_floor: float = Field(default=0.01, gt=0.0, description="lambda_min 安全下限")
    estimator: EstimatorMode = Field(default="shots", description="估計器模式")
    seed: int = Field(default=0, ge=0, description="隨機種子")
    trace: Optional[Path] = Field(default=None, description="CSV 軌跡輸出")
    report: Optional[Path] = Field(default=None, description="JSON 報告輸出")
    mu: Optional[list[float]] = Field(default=None, description="估計時使用的對偶點")
    mode: Literal["gradient", "hessian"] = Field(default="gradient", description="估計器種類")
    index_i: int = Field(default=0, ge=0, description="約束索引 i")
    index_j: int = Field(default=0, ge=0, description="約束索引 j")
    budget_shots: Optional[int] = Field(default=None, ge=1, description="覆寫射擊數")
    matrix_x: Optional[Path] = Field(default=None, description="散度的第一個矩陣")
    matrix_y: Optional[Path] = Field(default=None, description="散度的第二個矩陣")
    generator: Optional[Literal["random-psd", "diagonal", "equal"]] = Field(
        default=None, description="命名的矩陣生成器"
    )
    dim: int = Field(default=2, ge=1, description="生成器維數")
    channel: Optional[str] = Field(default=None, description="attenuator:ETA:N 等通道規格")
    lambda_min: Optional[float] = Field(default=None, gt=0.0, description="預算的 lambda_min")
    alpha_norm: float = Field(default=1.0, gt=0.0, description="預算的權重範數")
    h_norm: float = Field(default=1.0, gt=0.0, description="||h||_1")
    emit_density: Optional[Path] = Field(default=None, description="Cauchy 密度 CSV 輸出")
    tau: float = Field(default=1.0, gt=0.0, description="Cauchy 尺度參數")

    @field_validator("schedule")
    @classmethod
    def validate_schedule(cls, v: Optional[str]) -> Optional[str]:
        if v is None or v in ("dimension", "spectral"):
            return v
        head, _, tail = v.partition(":")
        if head == "entropy" and tail:
            if tail.lower() != "inf":
                value = float(tail)
                if not value > 0.0:
                    raise ValueError("entropy schedule needs a positive S_max")
            return v
        raise ValueError(f"unknown schedule {v!r}")

    @model_validator(mode="after")
    def validate_command(self) -> "RunConfig":
        if self.command in NEEDS_INSTANCE:
            if self.instance is None:
                raise ValueError(f"{self.command} needs --instance")
            if not self.instance.is_file():
                raise ValueError(f"instance file {self.instance} does not exist")
        if self.command in ("solve", "bounds"):
            if self.temperature is not None and self.schedule is not None:
                raise ValueError("give either --temperature or --schedule, not both")
        if self.command == "estimate" and self.temperature is None:
            raise ValueError("estimate needs --temperature")
        if self.command == "divergence" and self.generator is None:
            if self.matrix_x is None or self.matrix_y is None:
                raise ValueError("divergence needs --x and --y or --generator")
            for path in (self.matrix_x, self.matrix_y):
                if not path.is_file():
                    raise ValueError(f"matrix file {path} does not exist")
        if self.command == "budget" and self.temperature is None:
            raise ValueError("budget needs --temperature")
        if self.command == "budget" and self.lambda_min is None:
            raise ValueError("budget needs --lambda-min")
        return self

    def resolved_schedule(self) -> str:
        """The schedule spec, defaulting to dimension when no temperature is set"""
        if self.schedule is not None:
            return self.schedule
        return "fixed" if self.temperature is not None else "dimension"
