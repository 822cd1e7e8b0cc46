import numpy as np
import pandas as pd
import pytest

from confluent.bench import (
    EXPERIMENT_DEFAULTS,
    ExperimentConfig,
    build_jobs,
    build_parser,
    config_from_args,
    ks_table,
    main,
    run_experiment,
    stream_id_for,
)
from confluent.errors import ConfigError
from confluent.results import read_results


def _bias_config(**overrides):
    values = dict(experiment="bias", x0=0.0, xT=0.5, T=[1.0], n_bridges=3, n_mcmc=1,
                  model="brownian", dof=None, sdb_delta=[0.4, 0.2])
    values.update(overrides)
    return ExperimentConfig(**values)


def test_stream_ids_are_disjoint():
    config = _bias_config()
    jobs = build_jobs(config)
    assert len(jobs) == 9
    assert len({j.stream_id for j in jobs}) == 9
    assert stream_id_for(config, 1, 0, 2) == 5
    assert [j.order for j in jobs] == sorted(j.order for j in jobs)


def test_stream_base_shifts_ids():
    assert stream_id_for(_bias_config(stream_base=100), 0, 0, 0) == 100


def test_timing_jobs_skip_psrs_beyond_cutoff():
    config = ExperimentConfig(experiment="timing", x0=7.0, xT=7.0, T=[1.0, 10.0], n_bridges=2, n_mcmc=0)
    jobs = build_jobs(config)
    assert [j.psrs_stream_id is not None for j in jobs] == [True, True, False, False]
    ids = [j.stream_id for j in jobs] + [j.psrs_stream_id for j in jobs if j.psrs_stream_id is not None]
    assert len(set(ids)) == len(ids)


@pytest.mark.parametrize("overrides", [
    dict(T=[]),
    dict(T=[-1.0]),
    dict(n_bridges=0),
    dict(n_mcmc=-1),
    dict(workers=0),
    dict(fmt="xml"),
    dict(sdb_delta=[0.0]),
    dict(experiment="speed"),
])
def test_invalid_configs(overrides):
    with pytest.raises(ConfigError):
        _bias_config(**overrides)


def test_explicit_options_override_environment(monkeypatch):
    monkeypatch.setenv("CONFLUENT_GAMMA", "5")
    monkeypatch.setenv("CONFLUENT_COIN_CEILING", "77")
    settings = _bias_config(gamma=2.0).settings()
    assert settings.gamma == 2.0
    assert settings.coin_ceiling == 77


def test_parser_and_defaults():
    args = build_parser().parse_args(["bias", "--T", "1,2", "--bridges", "4"])
    config = config_from_args(args)
    assert config.T == [1.0, 2.0]
    assert config.n_bridges == 4
    assert config.x0 == EXPERIMENT_DEFAULTS["bias"]["x0"]
    assert config.n_mcmc == 50
    assert config.output_path == "bias.csv"


def test_ks_table():
    df = pd.DataFrame({
        "method": ["cdb"] * 50 + ["sdb(delta=0.4)"] * 50,
        "delta": [np.nan] * 50 + [0.4] * 50,
        "replicate": list(range(50)) * 2,
        "midpoint": list(np.linspace(0, 1, 50)) + list(np.linspace(5, 6, 50)),
    })
    table = ks_table(df)
    assert len(table) == 1
    assert table[0]["method"] == "sdb(delta=0.4)"
    assert table[0]["delta"] == 0.4
    assert table[0]["ks_statistic"] == pytest.approx(1.0)


def test_run_experiment_bias_rows():
    df, meta = run_experiment(_bias_config(n_bridges=2), progress=False)
    assert len(df) == 6
    assert list(dict.fromkeys(df["method"])) == ["cdb", "sdb(delta=0.4)", "sdb(delta=0.2)"]
    assert meta["model"] == "brownian"
    assert [row["method"] for row in meta["ks"]] == ["sdb(delta=0.4)", "sdb(delta=0.2)"]


def test_bias_cli_writes_reproducible_file(tmp_path):
    argv = ["bias", "--model", "brownian", "--x0", "0", "--xT", "0.5", "--T", "1", "--bridges", "2",
            "--mcmc-steps", "1", "--sdb-delta", "0.25", "--seed", "3", "--no-progress"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    df, header = read_results(first)
    assert header["experiment"] == "bias"
    assert len(df) == 4


def test_paths_cli(tmp_path):
    out = tmp_path / "paths.json"
    argv = ["paths", "--dof", "3", "--x0", "0", "--xT", "0", "--T", "1", "--bridges", "2",
            "--mcmc-steps", "1", "--format", "json", "--out", str(out), "--no-progress"]
    assert main(argv) == 0
    df, _ = read_results(out)
    assert sorted(df["bridge"].unique()) == [0, 1]
    for _, path in df.groupby("bridge"):
        assert path["t"].iloc[0] == 0.0 and path["t"].iloc[-1] == 1.0
        assert path["value"].iloc[0] == 0.0 and path["value"].iloc[-1] == 0.0


def test_timing_cli(tmp_path):
    out = tmp_path / "timing.csv"
    argv = ["timing", "--model", "brownian", "--x0", "0", "--xT", "0", "--T", "1", "--bridges", "1",
            "--mcmc-steps", "0", "--out", str(out), "--no-progress"]
    assert main(argv) == 0
    df, _ = read_results(out)
    assert df["method"].tolist() == ["cdb", "psrs"]
    assert df["status"].tolist() == ["ok", "ok"]
    assert (df["seconds"] >= 0).all()


def test_cli_reports_configuration_errors(tmp_path, capsys):
    assert main(["bias", "--bridges", "0", "--out", str(tmp_path / "x.csv"), "--no-progress"]) == 1
    assert "bridge-bench: erreur" in capsys.readouterr().err


@pytest.mark.slow
def test_worker_pool_matches_serial_run():
    serial, _ = run_experiment(_bias_config(n_bridges=4), progress=False)
    pooled, _ = run_experiment(_bias_config(n_bridges=4, workers=2), progress=False)
    pd.testing.assert_frame_equal(serial, pooled)


@pytest.mark.slow
def test_sdb_bias_shrinks_with_step():
    config = ExperimentConfig(experiment="bias", x0=2.0, xT=3.3, T=[4.0], n_bridges=2000, n_mcmc=30,
                              dof=3.0, sdb_delta=[0.4, 0.005], workers=4)
    _, meta = run_experiment(config, progress=False)
    ks = {row["delta"]: row for row in meta["ks"]}
    assert ks[0.4]["ks_statistic"] > ks[0.005]["ks_statistic"]
    assert ks[0.005]["p_value"] > 1e-3


@pytest.mark.slow
def test_cdb_cost_grows_linearly_with_horizon():
    config = ExperimentConfig(experiment="timing", x0=7.0, xT=7.0, T=[50.0, 100.0], n_bridges=30, n_mcmc=20,
                              dof=100.0, psrs_cutoff=1.0)
    df, _ = run_experiment(config, progress=False)
    medians = df[df["method"] == "cdb"].groupby("T")["seconds"].median()
    assert 1.6 <= medians[100.0] / medians[50.0] <= 2.6
