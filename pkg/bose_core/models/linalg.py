"""
稠密 Hermitian 線性代數相關的 Pydantic 模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class HermitianMatrix(BaseModel):
    """A dense Hermitian matrix. Build it with :func:`bose_core.linalg.as_hermitian`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    entries: np.ndarray = Field(..., description="稠密複數 d×d 陣列")
    residual: float = Field(default=0.0, ge=0.0, description="對稱化之前的 Hermitian 殘差")

    @field_validator("entries", mode="before")
    @classmethod
    def validate_entries(cls, v: Any) -> np.ndarray:
        """驗證為有限的方陣"""
        array = np.array(v, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise ValueError(f"entries must be a non-empty square matrix, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("entries must be finite")
        return _readonly(array)

    @property
    def dim(self) -> int:
        """The dimension d"""
        return int(self.entries.shape[0])

    def __array__(self, dtype: Any = None, copy: Any = None) -> np.ndarray:
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


class EigenSystem(BaseModel):
    """Eigenvalues sorted ascending with the matching orthonormal eigenvector columns"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    eigenvalues: np.ndarray = Field(..., description="升序排列的實本徵值")
    eigenvectors: np.ndarray = Field(..., description="以列存放的酉矩陣")

    @field_validator("eigenvalues", mode="before")
    @classmethod
    def validate_eigenvalues(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=float)
        if array.ndim != 1:
            raise ValueError("eigenvalues must be a vector")
        return _readonly(array)

    @field_validator("eigenvectors", mode="before")
    @classmethod
    def validate_eigenvectors(cls, v: Any) -> np.ndarray:
        return _readonly(np.array(v, dtype=complex))

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self, values: np.ndarray | None = None) -> np.ndarray:
        """Return V diag(values) V^dagger (the stored eigenvalues by default)"""
        lam = self.eigenvalues if values is None else np.asarray(values)
        vecs = self.eigenvectors
        return (vecs * lam) @ vecs.conj().T

    def rotate(self, matrix: np.ndarray) -> np.ndarray:
        """Express ``matrix`` in this eigenbasis: V^dagger A V"""
        vecs = self.eigenvectors
        return vecs.conj().T @ np.asarray(matrix) @ vecs
