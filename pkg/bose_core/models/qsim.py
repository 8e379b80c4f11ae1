"""
模擬量子估計器的預算與結果模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

EstimatorKind = Literal["gradient", "hessian"]


class EstimatorBudget(BaseModel):
    """
    Truncation depth, time cut-offs and shot counts for one estimator call.

    Gradient budgets index ``t_max`` and ``shots`` by m = 1..M. Hessian budgets
    index ``t_max`` by m1 + m2 = 2..2M and ``shots`` by the M×M grid, row-major.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: EstimatorKind = Field(..., description="梯度或 Hessian")
    depth: int = Field(..., ge=1, description="截斷深度 M")
    t_max: list[float] = Field(..., description="時間截斷")
    shots: list[int] = Field(..., description="射擊數")
    epsilon: float = Field(..., gt=0.0, description="總精度 epsilon")
    alpha_norm: float = Field(..., gt=0.0, description="狀態模型權重的 1-範數（Hessian 為乘積）")
    temperature: float = Field(..., gt=0.0, description="溫度 T")
    lambda_min: float = Field(..., gt=0.0, description="最小本徵值")

    @model_validator(mode="after")
    def validate_lengths(self) -> "EstimatorBudget":
        m = self.depth
        want_t = m if self.mode == "gradient" else 2 * m - 1
        want_n = m if self.mode == "gradient" else m * m
        if len(self.t_max) != want_t:
            raise ValueError(f"t_max needs {want_t} entries, got {len(self.t_max)}")
        if len(self.shots) != want_n:
            raise ValueError(f"shots needs {want_n} entries, got {len(self.shots)}")
        if any(t <= 0.0 for t in self.t_max):
            raise ValueError("t_max entries must be positive")
        if any(n < 1 for n in self.shots):
            raise ValueError("shot counts must be positive")
        return self

    @property
    def error_split(self) -> tuple[float, float, float]:
        """(series, tail, statistical) shares of epsilon"""
        third = self.epsilon / 3.0
        return (third, third, third)

    def cutoff(self, m1: int, m2: Optional[int] = None) -> float:
        if m2 is None:
            return self.t_max[m1 - 1]
        return self.t_max[m1 + m2 - 2]

    def shots_for(self, m1: int, m2: Optional[int] = None) -> int:
        if m2 is None:
            return self.shots[m1 - 1]
        return self.shots[(m1 - 1) * self.depth + (m2 - 1)]

    @property
    def total_shots(self) -> int:
        return int(sum(self.shots))


class ShotOutcome(BaseModel):
    """A single weighted ±1 measurement and the random choices behind it"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    z: Literal[-1, 1] = Field(..., description="測量結果")
    weight: float = Field(..., description="估計器權重")
    m: int = Field(..., ge=1, description="級數項 m（Hessian 為 m1）")
    t: float = Field(..., description="演化時間（Hessian 為 t1）")
    k: int = Field(..., ge=0, description="狀態索引")
    m2: Optional[int] = Field(default=None, ge=1, description="Hessian 的 m2")
    s: Optional[float] = Field(default=None, ge=0.0, le=1.0, description="Hessian 的 s")
    t2: Optional[float] = Field(default=None, description="Hessian 的 t2")
    l: Optional[int] = Field(default=None, ge=0, description="Hessian 的第二個狀態索引")  # noqa: E741

    @property
    def value(self) -> float:
        return self.z * self.weight


class EstimateReport(BaseModel):
    """An estimate together with the budget that produced it"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: EstimatorKind = Field(..., description="梯度或 Hessian")
    budget: EstimatorBudget = Field(..., description="預算")
    estimate: float = Field(..., description="估計值")
    stderr: float = Field(..., ge=0.0, description="標準誤差")
    exact: Optional[float] = Field(default=None, description="解析值")
    predicted_gates: Optional[float] = Field(default=None, ge=0.0, description="預測閘數")

    @property
    def abs_error(self) -> Optional[float]:
        if self.exact is None:
            return None
        return abs(self.estimate - self.exact)

    def passes(self) -> Optional[bool]:
        """|error| <= epsilon + 3·stderr"""
        error = self.abs_error
        if error is None:
            return None
        return error <= self.budget.epsilon + 3.0 * self.stderr


class RuntimePrediction(BaseModel):
    """Predicted gate counts"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Literal["gradient", "hessian", "end_to_end"] = Field(..., description="模式")
    asymptotic: float = Field(..., ge=0.0, description="漸近公式")
    concrete: Optional[int] = Field(default=None, ge=0, description="由預算得出的具體閘數")
