# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
from typing import Literal, TypedDict

# 複數項以 [re, im] 表示，矩陣按行存放
ComplexEntryJson = list[float]
MatrixJson = list[list[ComplexEntryJson]]


class InstanceJson(TypedDict):
    d: int
    c: int
    H: MatrixJson
    Q: list[MatrixJson]
    q: list[float]


class MatrixFileJson(TypedDict):
    matrix: MatrixJson


class TraceRowJson(TypedDict):
    iter: int
    f_T: float
    grad_norm: float
    lambda_min: float
    step: float
    wall_ms: float


class ReportHeaderJson(TypedDict):
    schema_version: str
    command: Literal["solve", "oracle", "bounds", "estimate", "divergence", "budget"]
    config: dict
