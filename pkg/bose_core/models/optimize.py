"""
優化器設定與執行記錄相關的 Pydantic 模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .thermal import TemperatureSchedule

Method = Literal["ga", "newton", "sga", "snewton"]
EstimatorMode = Literal["shots", "series", "exact"]

STOCHASTIC_METHODS = ("sga", "snewton")


class OptimizerConfig(BaseModel):
    """Settings for one optimizer run"""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    method: Method = Field(default="ga", description="優化方法")
    step: Union[float, Literal["auto"]] = Field(
        default="auto", description="步長 eta，或 auto"
    )
    max_iters: int = Field(default=1000, gt=0, description="最大迭代次數 J")
    grad_tol: float = Field(default=1e-8, gt=0.0, description="梯度範數容差")
    lambda_floor: float = Field(default=0.01, gt=0.0, description="lambda_min 安全下限")
    temperature: Optional[float] = Field(default=None, gt=0.0, description="固定溫度 T")
    schedule: Optional[TemperatureSchedule] = Field(default=None, description="溫度排程")
    epsilon: Optional[float] = Field(default=None, gt=0.0, description="每步估計精度 epsilon_j")
    target_accuracy: Optional[float] = Field(
        default=None, gt=0.0, description="目標精度 delta，用於自動選取 epsilon_j"
    )
    precision_constant: float = Field(default=1.0, gt=0.0, description="epsilon_j 的常數 C")
    estimator: EstimatorMode = Field(default="shots", description="估計器模式")
    shot_constant: float = Field(default=9.0, gt=0.0, description="Hoeffding 射擊數常數")
    budget_depth: Optional[int] = Field(default=None, ge=1, description="截斷深度 M 的上限")
    budget_shots: Optional[int] = Field(default=None, ge=1, description="覆寫每項射擊數 N")
    final_shots: Optional[int] = Field(
        default=None, ge=1, description="最終能量估計的每項射擊數，預設同 budget_shots"
    )
    seed: int = Field(default=0, ge=0, description="主隨機種子")
    max_halvings: int = Field(default=60, ge=1, description="回溯減半上限")
    phase1_max_iters: int = Field(default=2000, ge=1, description="嚴格可行起點搜索的迭代上限")
    shift_cap: float = Field(default=1e6, gt=0.0, description="隨機 Newton 的最大 Hessian 平移")
    record_wall_time: bool = Field(default=False, description="記錄牆鐘時間")

    @model_validator(mode="after")
    def validate_method_fields(self) -> "OptimizerConfig":
        if (self.temperature is None) == (self.schedule is None):
            raise ValueError("exactly one of temperature and schedule must be given")
        if isinstance(self.step, float) and self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.is_stochastic and self.estimator != "exact":
            if self.epsilon is None and self.target_accuracy is None:
                raise ValueError(
                    "stochastic methods need epsilon or target_accuracy"
                )
        return self

    @property
    def is_stochastic(self) -> bool:
        return self.method in STOCHASTIC_METHODS


class IterationRecord(BaseModel):
    """One accepted iterate"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    iteration: int = Field(..., ge=0, description="迭代序號")
    mu: list[float] = Field(..., description="對偶點 mu")
    f_T: float = Field(..., description="f_T(mu)")
    grad_norm: float = Field(..., ge=0.0, description="梯度範數")
    lambda_min: float = Field(..., gt=0.0, description="K_mu 的最小本徵值")
    step: float = Field(..., ge=0.0, description="實際採用的步長")
    wall_ms: float = Field(default=0.0, ge=0.0, description="牆鐘時間（毫秒）")
    halvings: int = Field(default=0, ge=0, description="回溯減半次數")
    hessian_shift: float = Field(default=0.0, ge=0.0, description="Hessian 平移量")
    fallback: bool = Field(default=False, description="是否退回梯度步")


class ErrorDecomposition(BaseModel):
    """Audit of |f̃_T(mu_J) - E| split into bounded contributions"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    entropy_correction: float = Field(..., ge=0.0, description="T·S_BE(X_T(mu_J))")
    dual_suboptimality: float = Field(..., ge=0.0, description="對偶次優性上界")
    approximation: float = Field(..., ge=0.0, description="溫度排程的近似誤差上界")
    estimation: float = Field(default=0.0, ge=0.0, description="最終估計的統計誤差")
    measured_gap: Optional[float] = Field(default=None, ge=0.0, description="實測誤差")

    @property
    def total(self) -> float:
        return (
            self.entropy_correction
            + self.dual_suboptimality
            + self.approximation
            + self.estimation
        )

    @property
    def dominates(self) -> Optional[bool]:
        if self.measured_gap is None:
            return None
        return self.total >= self.measured_gap


class FinalReport(BaseModel):
    """Summary of a finished run"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mu_final: list[float] = Field(..., description="最終對偶點")
    f_tilde: float = Field(..., description="f̃_T(mu_final)，即能量估計")
    f_T: float = Field(..., description="f_T(mu_final)")
    temperature: float = Field(..., gt=0.0, description="溫度 T")
    iterations: int = Field(..., ge=0, description="迭代次數")
    lambda_min_final: float = Field(..., gt=0.0, description="最終 lambda_min")
    grad_norm_final: float = Field(..., ge=0.0, description="最終梯度範數")
    converged: bool = Field(..., description="是否滿足梯度容差")
    stop_reason: Literal["tolerance", "max_iters"] = Field(..., description="停止原因")
    f_tilde_stderr: float = Field(default=0.0, ge=0.0, description="能量估計的標準誤差")
    estimator_calls: int = Field(default=0, ge=0, description="估計器呼叫次數")
    oracle_value: Optional[float] = Field(default=None, description="參考最優值")
    oracle_gap: Optional[float] = Field(default=None, description="f̃_T 與參考值之差")
    decomposition: Optional[ErrorDecomposition] = Field(default=None, description="誤差分解")


class RunTrace(BaseModel):
    """Per-iteration records plus the final report"""

    model_config = ConfigDict(extra="forbid")

    method: Method = Field(..., description="優化方法")
    records: list[IterationRecord] = Field(default_factory=list, description="迭代記錄")
    final: Optional[FinalReport] = Field(default=None, description="最終報告")

    @model_validator(mode="after")
    def validate_order(self) -> "RunTrace":
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.iteration <= prev.iteration:
                raise ValueError("iteration indices must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.records)
