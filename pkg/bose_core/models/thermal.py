"""
熱算符、溫度排程與光滑度常數的 Pydantic 模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .linalg import EigenSystem, HermitianMatrix
from .sdp import SpectralSummary


class ThermalOperator(BaseModel):
    """
    X_T = (e^{K/T} - I)^{-1} together with X_T + I and the eigensystem of K it
    was built from. Every matrix function of K at this temperature reuses the
    stored eigensystem.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    X: HermitianMatrix = Field(..., description="Bose-Einstein 熱算符")
    X_plus_I: HermitianMatrix = Field(..., description="熱算符加單位矩陣")
    K_spectrum: EigenSystem = Field(..., description="對偶鬆弛算符的本徵系統")
    temperature: float = Field(..., gt=0.0, description="溫度 T")
    occupations: np.ndarray = Field(..., description="每個模式的佔據數 x_j")

    @field_validator("occupations", mode="before")
    @classmethod
    def validate_occupations(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=float)
        if np.any(array < 0.0):
            raise ValueError("occupations must be non-negative")
        array.setflags(write=False)
        return array

    @property
    def dim(self) -> int:
        return self.X.dim

    @property
    def eigenvalues(self) -> np.ndarray:
        """Spectrum of K, ascending"""
        return self.K_spectrum.eigenvalues


class TemperatureSchedule(BaseModel):
    """
    Chooses T from a target precision. ``entropy`` needs ``s_max``,
    ``dimension`` needs ``dim`` and ``spectral`` needs the low-spectrum data of
    K at the optimum together with ``dim``.

    Example:

    .. code:: python

        schedule = TemperatureSchedule.dimension(10, epsilon=0.1)
        T = bose_core.thermal.temperature_for_precision(schedule)  # 0.01
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Literal["entropy", "dimension", "spectral"] = Field(..., description="排程模式")
    epsilon: float = Field(..., gt=0.0, description="目標精度 epsilon")
    s_max: Optional[float] = Field(default=None, gt=0.0, description="熵上界 S_max，可為 inf")
    dim: Optional[int] = Field(default=None, ge=1, description="希爾伯特空間維數 d")
    lambda_min: Optional[float] = Field(default=None, gt=0.0, description="最小本徵值")
    gap: Optional[float] = Field(default=None, ge=0.0, description="譜隙 Delta")
    degeneracy: Optional[int] = Field(default=None, ge=1, description="基態簡併度 d0")

    @model_validator(mode="after")
    def validate_parameters(self) -> "TemperatureSchedule":
        if self.mode == "entropy" and self.s_max is None:
            raise ValueError("entropy schedule needs s_max")
        if self.mode == "dimension" and self.dim is None:
            raise ValueError("dimension schedule needs dim")
        if self.mode == "spectral":
            missing = [
                name
                for name in ("dim", "lambda_min", "gap", "degeneracy")
                if getattr(self, name) is None
            ]
            if missing:
                raise ValueError(f"spectral schedule needs {', '.join(missing)}")
            if self.degeneracy > self.dim:  # type: ignore[operator]
                raise ValueError("degeneracy cannot exceed dim")
        return self

    @classmethod
    def entropy(cls, s_max: float, epsilon: float) -> "TemperatureSchedule":
        return cls(mode="entropy", s_max=s_max, epsilon=epsilon)

    @classmethod
    def dimension(cls, dim: int, epsilon: float) -> "TemperatureSchedule":
        return cls(mode="dimension", dim=dim, epsilon=epsilon)

    @classmethod
    def spectral(cls, summary: SpectralSummary, epsilon: float) -> "TemperatureSchedule":
        """Build a spectral schedule from the spectral summary of K at an optimum"""
        return cls(
            mode="spectral",
            epsilon=epsilon,
            dim=summary.dim,
            lambda_min=summary.lambda_min,
            gap=summary.gap,
            degeneracy=summary.degeneracy,
        )

    @classmethod
    def from_trace_constraint(
        cls, total: float, dim: int, epsilon: float
    ) -> "TemperatureSchedule":
        """
        Entropy schedule for problems that fix Tr[X] = ``total``: the entropy is
        then at most d·g(total/d)
        """
        from ..thermal import trace_fixed_entropy_bound

        return cls.entropy(trace_fixed_entropy_bound(total, dim), epsilon)


class SmoothnessBound(BaseModel):
    """Worst-case occupation and Hessian bound over a lambda_min-floored region"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_min_floor: float = Field(..., gt=0.0, description="lambda_min 下限")
    temperature: float = Field(..., gt=0.0, description="溫度 T")
    occupation: float = Field(..., ge=0.0, description="最壞情況佔據數 n̄")
    L_T: float = Field(..., ge=0.0, description="光滑度常數 L_T")

    @property
    def step(self) -> float:
        """1/L_T, the largest admissible gradient-ascent step (inf when L_T is 0)"""
        return float("inf") if self.L_T == 0.0 else 1.0 / self.L_T


class BoundCheck(BaseModel):
    """One approximation bound at a regularized optimum, with both slacks"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Literal["entropy", "dimension", "spectral"] = Field(..., description="界的名稱")
    bound: float = Field(..., ge=0.0, description="界的數值")
    lower_slack: Optional[float] = Field(default=None, description="下側餘量")
    upper_slack: Optional[float] = Field(default=None, description="上側餘量")

    @property
    def holds(self) -> Optional[bool]:
        """None when no oracle value was supplied"""
        if self.lower_slack is None or self.upper_slack is None:
            return None
        return self.lower_slack >= 0.0 and self.upper_slack >= 0.0


class ApproximationBounds(BaseModel):
    """How far the regularized optimum can sit from the true SDP value"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    temperature: float = Field(..., gt=0.0, description="溫度 T")
    dim: int = Field(..., ge=1, description="維數 d")
    f_T: float = Field(..., description="正則化對偶目標 f_T")
    f_tilde: float = Field(..., description="未正則化能量 f̃_T")
    entropy_correction: float = Field(..., ge=0.0, description="T·S_BE(X_T)")
    summary: SpectralSummary = Field(..., description="K 在最優點的譜摘要")
    oracle_value: Optional[float] = Field(default=None, description="參考最優值 E")
    checks: tuple[BoundCheck, ...] = Field(..., description="各個界")

    def check(self, name: str) -> BoundCheck:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)

    @property
    def all_hold(self) -> Optional[bool]:
        results = [item.holds for item in self.checks]
        if any(r is None for r in results):
            return None
        return all(results)
