"""
Report writers: JSON, CSV and plain text.

CSV uses a header row, commas, and "." as the decimal point. Infinite
values are written as ``inf``, and as the string ``"inf"`` in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

from ..core.metrics import MetricsReport
from ..core.pipeline import FusionResult

PathLike = Union[str, Path]

REPORT_FORMATS = ("json", "csv", "text")
BENCH_COLUMNS = ("seed", "mode", "EN", "PSNR", "RMSE", "SD", "SSIM_a", "SSIM_b", "wall_ms")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".12g")
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def _flatten(data: Mapping[str, Any]) -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        name = str(key)
        if isinstance(value, Mapping):
            flat.update(_flatten(value))
        elif isinstance(value, (list, tuple, np.ndarray)):
            for index, item in enumerate(value):
                flat[f"{name}_{index}"] = item
        else:
            flat[name] = value
    return flat


def format_mapping(data: Mapping[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(data), indent=2, allow_nan=False) + "\n"
    flat = _flatten(data)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(flat))
        writer.writerow([_cell(v) for v in flat.values()])
        return buffer.getvalue()
    if fmt == "text":
        return "".join(f"{key}: {_cell(value)}\n" for key, value in flat.items())
    raise ValueError(f"Unknown report format {fmt}")


def format_report(report: MetricsReport, fmt: str) -> str:
    return format_mapping(report.to_dict(), fmt)


def format_result(result: FusionResult, fmt: str) -> str:
    return format_mapping(result.to_dict(), fmt)


def write_text(path: PathLike, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")


def write_archive_csv(dump: Sequence[Tuple[np.ndarray, np.ndarray]], path: PathLike) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if dump:
        dims, objectives = len(dump[0][0]), len(dump[0][1])
        writer.writerow(["index"] + [f"w_{i}" for i in range(dims)] + [f"f_{j}" for j in range(objectives)])
        for index, (position, fitness) in enumerate(dump):
            writer.writerow([index] + [_cell(v) for v in position] + [_cell(v) for v in fitness])
    else:
        writer.writerow(["index"])
    write_text(path, buffer.getvalue())


def bench_row(seed: int, mode: str, report: MetricsReport, wall_ms: float) -> Dict[str, Any]:
    return {
        "seed": seed,
        "mode": mode,
        "EN": report.entropy,
        "PSNR": report.psnr,
        "RMSE": report.rmse,
        "SD": report.sd,
        "SSIM_a": report.ssim_vs_a,
        "SSIM_b": report.ssim_vs_b,
        "wall_ms": round(wall_ms, 3),
    }


def format_bench_csv(rows: Iterable[Mapping[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[column]) for column in BENCH_COLUMNS])
    return buffer.getvalue()
