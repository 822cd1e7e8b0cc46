import json
import math

import pandas as pd
import pytest

from confluent.errors import ConfigError
from confluent.results import SCHEMAS, parse_results, read_results, render_results, write_results


@pytest.fixture
def bias_frame():
    return pd.DataFrame({
        "method": ["cdb", "sdb(delta=0.4)"],
        "delta": [None, 0.4],
        "replicate": [0, 0],
        "midpoint": [2.6500000000000004, 1.0 / 3.0],
    })


def test_csv_header_line(bias_frame):
    text = render_results(bias_frame, "bias", meta={"seed": 7})
    first, _, body = text.partition("\n")
    header = json.loads(first[2:])
    assert first.startswith("# ")
    assert header == {"schema_version": 1, "experiment": "bias", "columns": SCHEMAS["bias"], "meta": {"seed": 7}}
    assert body.splitlines()[0] == "method,delta,replicate,midpoint"


def test_csv_keeps_full_precision(bias_frame):
    df, header = parse_results(render_results(bias_frame, "bias"))
    assert header["experiment"] == "bias"
    assert df["midpoint"].tolist() == bias_frame["midpoint"].tolist()
    assert math.isnan(df["delta"].iloc[0])


def test_json_rows(bias_frame):
    payload = json.loads(render_results(bias_frame, "bias", fmt="json"))
    assert payload["rows"][0] == {"method": "cdb", "delta": None, "replicate": 0, "midpoint": 2.6500000000000004}
    df, _ = parse_results(json.dumps(payload))
    assert df["midpoint"].tolist() == bias_frame["midpoint"].tolist()


def test_rendering_is_deterministic(bias_frame):
    assert render_results(bias_frame, "bias") == render_results(bias_frame.copy(), "bias")


def test_extra_columns_dropped(bias_frame):
    bias_frame["debug"] = 1
    assert "debug" not in render_results(bias_frame, "bias")


def test_missing_columns(bias_frame):
    with pytest.raises(ConfigError):
        render_results(bias_frame.drop(columns="midpoint"), "bias")


def test_unknown_experiment_or_format(bias_frame):
    with pytest.raises(ConfigError):
        render_results(bias_frame, "speed")
    with pytest.raises(ConfigError):
        render_results(bias_frame, "bias", fmt="parquet")


def test_schema_version_checked(bias_frame):
    text = render_results(bias_frame, "bias", fmt="json").replace('"schema_version": 1', '"schema_version": 99')
    with pytest.raises(ConfigError):
        parse_results(text)


def test_unrecognised_text():
    with pytest.raises(ConfigError):
        parse_results("method,delta\n")


def test_write_and_read(tmp_path):
    df = pd.DataFrame({"T": [1.0, 1.0], "bridge": [0, 0], "t": [0.0, 1.0], "value": [7.0, 7.0]})
    path = write_results(df, tmp_path / "paths.csv", "paths")
    back, header = read_results(path)
    assert header["columns"] == ["T", "bridge", "t", "value"]
    pd.testing.assert_frame_equal(back, df, check_dtype=False)
