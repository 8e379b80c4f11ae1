"""
SDP 問題數據相關的 Pydantic 模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .linalg import HermitianMatrix

DENSITY_TOL = 1e-9


class SdpInstance(BaseModel):
    """The standard-form problem min Tr[HX] s.t. Tr[Q_i X] = q_i, X >= 0"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    H: HermitianMatrix = Field(..., description="目標算符 H")
    Q: tuple[HermitianMatrix, ...] = Field(..., min_length=1, description="約束算符 Q_1..Q_c")
    q: np.ndarray = Field(..., description="約束目標值 q")

    @field_validator("q", mode="before")
    @classmethod
    def validate_q(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=float).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("q must be finite")
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def validate_shapes(self) -> "SdpInstance":
        """所有矩陣必須同維，q 的長度必須等於約束數"""
        for i, matrix in enumerate(self.Q):
            if matrix.dim != self.H.dim:
                raise ValueError(
                    f"Q[{i}] has dimension {matrix.dim}, H has dimension {self.H.dim}"
                )
        if self.q.shape[0] != len(self.Q):
            raise ValueError(f"q has length {self.q.shape[0]}, expected {len(self.Q)}")
        return self

    @property
    def d(self) -> int:
        """Hilbert-space dimension"""
        return self.H.dim

    @property
    def c(self) -> int:
        """Number of constraints"""
        return len(self.Q)

    def constraint_stack(self) -> np.ndarray:
        """The constraints as one (c, d, d) array"""
        return np.stack([m.entries for m in self.Q])


class DualPoint(BaseModel):
    """A dual vector mu in R^c"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    mu: np.ndarray = Field(..., description="對偶化學勢向量")

    @field_validator("mu", mode="before")
    @classmethod
    def validate_mu(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=float).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("mu must be finite")
        array.setflags(write=False)
        return array

    def __len__(self) -> int:
        return int(self.mu.shape[0])


class StateTerm(BaseModel):
    """One weighted density matrix of a state model"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    weight: float = Field(..., allow_inf_nan=False, description="係數 alpha_k")
    state: HermitianMatrix = Field(..., description="密度矩陣 rho_k")

    @model_validator(mode="after")
    def validate_density(self) -> "StateTerm":
        """rho_k 必須半正定且跡為 1"""
        trace = float(np.trace(self.state.entries).real)
        if abs(trace - 1.0) > DENSITY_TOL:
            raise ValueError(f"state has trace {trace:.12g}, expected 1")
        lowest = float(np.linalg.eigvalsh(self.state.entries)[0])
        if lowest < -DENSITY_TOL:
            raise ValueError(f"state has negative eigenvalue {lowest:.6g}")
        return self


class StateModel(BaseModel):
    """Linear combination of states: A = sum_k alpha_k rho_k"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    terms: tuple[StateTerm, ...] = Field(..., min_length=1, description="加權密度矩陣")

    @property
    def one_norm(self) -> float:
        """||alpha||_1"""
        return float(sum(abs(t.weight) for t in self.terms))

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms], dtype=float)

    def states(self) -> np.ndarray:
        """The density matrices as one (n, d, d) array"""
        return np.stack([t.state.entries for t in self.terms])

    def recombine(self) -> np.ndarray:
        """sum_k alpha_k rho_k"""
        return np.einsum("k,kij->ij", self.weights, self.states())


class SpectralSummary(BaseModel):
    """Low-spectrum structure of a positive definite slack operator"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_min: float = Field(..., gt=0.0, description="最小本徵值")
    degeneracy: int = Field(..., ge=1, description="基態簡併度 d0")
    gap: float = Field(..., ge=0.0, description="譜隙 Delta")
    grouping_tol: float = Field(..., ge=0.0, description="分組容差")
    dim: int = Field(..., ge=1, description="總維數 d")

    @property
    def has_excited_spectrum(self) -> bool:
        """False when every eigenvalue sits in the ground group"""
        return self.degeneracy < self.dim
