import csv
import io
import json
import math

import numpy as np
import pytest

from src.core.image_model import Image
from src.core.metrics import MetricsReport
from src.io.reports import (
    BENCH_COLUMNS,
    bench_row,
    format_bench_csv,
    format_mapping,
    format_report,
    write_archive_csv,
)


def _report():
    x = Image(np.random.default_rng(0).integers(0, 256, (8, 8)))
    return MetricsReport.for_pair(x, x)


def test_json_report_writes_inf_as_string():
    data = json.loads(format_report(_report(), "json"))
    assert data["psnr"] == "inf"
    assert data["rmse"] == 0.0
    assert data["ssim_vs_b"] is None


def test_csv_report_has_header_and_one_row():
    rows = list(csv.reader(io.StringIO(format_report(_report(), "csv"))))
    assert len(rows) == 2
    record = dict(zip(*rows))
    assert record["psnr"] == "inf"
    assert record["ssim_vs_b"] == ""
    assert float(record["ssim_vs_a"]) == 1.0


def test_text_report_lines():
    text = format_report(_report(), "text")
    assert "psnr: inf\n" in text
    assert text.startswith("entropy: ")


def test_nested_mappings_are_flattened():
    data = {"metrics": {"rmse": 1.5}, "weights": {"lowpass_weight": 0.25, "highpass_weights": [0.5, 1.0]}, "n": 3}
    rows = list(csv.reader(io.StringIO(format_mapping(data, "csv"))))
    assert rows[0] == ["rmse", "lowpass_weight", "highpass_weights_0", "highpass_weights_1", "n"]
    assert rows[1] == ["1.5", "0.25", "0.5", "1", "3"]
    assert json.loads(format_mapping(data, "json"))["weights"]["highpass_weights"] == [0.5, 1.0]


def test_negative_infinity_and_numpy_scalars():
    data = {"low": -math.inf, "count": np.int64(4), "flag": np.bool_(True)}
    loaded = json.loads(format_mapping(data, "json"))
    assert loaded == {"low": "-inf", "count": 4, "flag": True}
    assert format_mapping(data, "text") == "low: -inf\ncount: 4\nflag: true\n"


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        format_mapping({"a": 1}, "xml")


def test_archive_csv_columns(tmp_path):
    dump = [(np.array([0.1, 0.2]), np.array([-1.0, 2.0, 3.0])), (np.array([0.3, 0.4]), np.array([0.0, 1.0, 2.0]))]
    path = tmp_path / "archive.csv"
    write_archive_csv(dump, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["index", "w_0", "w_1", "f_0", "f_1", "f_2"]
    assert rows[2] == ["1", "0.3", "0.4", "0", "1", "2"]


def test_empty_archive_csv(tmp_path):
    path = tmp_path / "empty.csv"
    write_archive_csv([], path)
    assert path.read_text() == "index\n"


def test_bench_csv():
    report = _report()
    rows = [bench_row(1, "apso", report, 12.3456), bench_row(1, "pso", report, 7.0)]
    parsed = list(csv.reader(io.StringIO(format_bench_csv(rows))))
    assert tuple(parsed[0]) == BENCH_COLUMNS
    assert len(parsed) == 3
    assert parsed[1][1] == "apso"
    assert parsed[1][3] == "inf"
    assert parsed[1][-1] == "12.346"
