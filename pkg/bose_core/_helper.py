# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""This module contains some helper functions. It should not be used outside bose_core"""

import csv
import io
import json
import math
import os
from typing import Any, Iterable, Sequence

import aiofiles
import numpy as np

from ._internal_types.instance_types import InstanceJson, MatrixFileJson, MatrixJson
from .exceptions import InstanceValidationError, NotHermitian
from .linalg import HERMITIAN_RTOL, MatrixLike, as_array, as_hermitian
from .models import HermitianMatrix, SdpInstance


def matrix_from_json(data: Any, field: str) -> np.ndarray:
    """
    Parses a row-major matrix of [re, im] pairs. Plain real numbers are
    accepted as entries too.

    :raises InstanceValidationError: The data is not a square matrix of numbers
    """
    if not isinstance(data, list) or not data:
        raise InstanceValidationError(field, "expected a non-empty list of rows")
    rows = []
    for r, row in enumerate(data):
        if not isinstance(row, list):
            raise InstanceValidationError(f"{field}[{r}]", "expected a list")
        entries = []
        for c, entry in enumerate(row):
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                entries.append(complex(entry, 0.0))
            elif (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
            ):
                entries.append(complex(entry[0], entry[1]))
            else:
                raise InstanceValidationError(
                    f"{field}[{r}][{c}]", "expected a number or an [re, im] pair"
                )
        rows.append(entries)
    width = {len(row) for row in rows}
    if width != {len(rows)}:
        raise InstanceValidationError(field, f"matrix is not square ({len(rows)} rows)")
    array = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(array)):
        raise InstanceValidationError(field, "entries must be finite")
    return array


def matrix_to_json(a: MatrixLike) -> MatrixJson:
    """Row-major [re, im] pairs"""
    return [[[float(z.real), float(z.imag)] for z in row] for row in as_array(a)]


def hermitian_from_json(data: Any, field: str, rtol: float = HERMITIAN_RTOL) -> HermitianMatrix:
    try:
        return as_hermitian(matrix_from_json(data, field), rtol)
    except NotHermitian as e:
        raise InstanceValidationError(field, e.msg) from e


def matrix_file_from_json(data: Any, field: str, rtol: float = HERMITIAN_RTOL) -> HermitianMatrix:
    """Reads a ``{"matrix": ...}`` document"""
    if not isinstance(data, dict) or "matrix" not in data:
        raise InstanceValidationError(field, "expected an object with a 'matrix' field")
    return hermitian_from_json(data["matrix"], f"{field}.matrix", rtol)


def matrix_file_to_json(a: MatrixLike) -> MatrixFileJson:
    return {"matrix": matrix_to_json(a)}


def instance_from_json(data: Any, rtol: float = HERMITIAN_RTOL) -> SdpInstance:
    """
    Validates an instance document field by field and builds the instance

    :raises InstanceValidationError: Some field is missing or malformed
    """
    if not isinstance(data, dict):
        raise InstanceValidationError("instance", "expected a JSON object")
    for key in ("d", "c", "H", "Q", "q"):
        if key not in data:
            raise InstanceValidationError(key, "missing")
    d, c = data["d"], data["c"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InstanceValidationError("d", "expected a positive integer")
    if not isinstance(c, int) or isinstance(c, bool) or c < 1:
        raise InstanceValidationError("c", "expected a positive integer")

    H = hermitian_from_json(data["H"], "H", rtol)
    if H.dim != d:
        raise InstanceValidationError("H", f"dimension {H.dim} does not match d = {d}")
    if not isinstance(data["Q"], list) or len(data["Q"]) != c:
        raise InstanceValidationError("Q", f"expected a list of {c} matrices")
    Q = []
    for i, raw in enumerate(data["Q"]):
        m = hermitian_from_json(raw, f"Q[{i}]", rtol)
        if m.dim != d:
            raise InstanceValidationError(f"Q[{i}]", f"dimension {m.dim} does not match d = {d}")
        Q.append(m)
    q = data["q"]
    if (
        not isinstance(q, list)
        or len(q) != c
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in q)
    ):
        raise InstanceValidationError("q", f"expected a list of {c} numbers")
    if not all(math.isfinite(x) for x in q):
        raise InstanceValidationError("q", "entries must be finite")
    return SdpInstance(H=H, Q=tuple(Q), q=np.array(q, dtype=float))


def instance_to_json(inst: SdpInstance) -> InstanceJson:
    return {
        "d": inst.d,
        "c": inst.c,
        "H": matrix_to_json(inst.H),
        "Q": [matrix_to_json(m) for m in inst.Q],
        "q": [float(x) for x in inst.q],
    }


def json_safe(value: Any) -> Any:
    """Replaces non-finite floats by the strings "+inf", "-inf" and "nan" recursively"""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        return float(value)
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.generic):
        return json_safe(value.item())
    if isinstance(value, os.PathLike):
        return os.fspath(value)
    return value


async def read_json(path: str | os.PathLike) -> Any:
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        return json.loads(await f.read())


async def write_json(path: str | os.PathLike, data: Any) -> None:
    """Writes UTF-8 JSON with sorted keys so identical data gives identical bytes"""
    text = json.dumps(json_safe(data), indent=2, sort_keys=True, ensure_ascii=False)
    async with aiofiles.open(path, "w", encoding="utf-8") as f:
        await f.write(text + "\n")


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return buffer.getvalue()


async def write_csv(
    path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    """Writes a CSV file, floats in their shortest round-trip form"""
    text = format_csv(header, rows)
    async with aiofiles.open(path, "w", encoding="utf-8", newline="") as f:
        await f.write(text)
