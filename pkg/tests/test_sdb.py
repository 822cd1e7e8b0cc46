import numpy as np
import pytest
from scipy import stats

from confluent.diffusion_model import DiffusionSpec
from confluent.errors import ConfigError
from confluent.rngkit import RngStream
from confluent.sdb import (
    GridPath,
    SdbState,
    euler_ensemble,
    euler_path,
    first_crossing_index,
    run_sdb,
    sdb_mh_update,
    sdb_propose,
    snap_grid,
)


def _drift(c):
    zero = lambda x: 0.0 * np.asarray(x, dtype=float)
    return DiffusionSpec(lambda x: c + zero(x), zero, zero, c * c / 2.0, 0.0, 0.0, name=f"drift({c})")


def test_snap_grid():
    n, step = snap_grid(1.0, 0.3)
    assert n == 3
    assert step == pytest.approx(1.0 / 3.0)
    assert snap_grid(0.1, 1.0) == (1, 0.1)
    with pytest.raises(ConfigError):
        snap_grid(1.0, 0.0)


def test_grid_path_interpolation():
    path = GridPath(0.5, np.array([0.0, 1.0, 2.0]))
    assert path.T == 1.0
    assert path.value_at(0.25) == pytest.approx(0.5)
    np.testing.assert_allclose(path.times, [0.0, 0.5, 1.0])


def test_euler_path_shape(stream, t3):
    path = euler_path(stream, t3, 1.5, 2.0, 0.1)
    assert len(path.values) == 21
    assert path.values[0] == 1.5
    assert path.T == pytest.approx(2.0)


def test_euler_without_drift_has_brownian_increments(stream, bm):
    increments = np.diff(euler_path(stream, bm, 0.0, 100.0, 0.01).values)
    assert stats.kstest(increments / np.sqrt(0.01), "norm").pvalue > 1e-3


def test_euler_one_step_moments(stream):
    spec = _drift(0.5)
    ends = np.array([euler_path(stream, spec, 1.0, 0.1, 0.1).values[-1] for _ in range(10_000)])
    assert abs(ends.mean() - 1.05) < 5 * np.sqrt(0.1 / 10_000)
    assert abs(ends.var() - 0.1) < 0.006


def test_first_crossing_index():
    assert first_crossing_index(np.zeros(5)) == 0
    assert first_crossing_index(np.array([1.0, 0.5, -0.2, 0.3])) == 1
    assert first_crossing_index(np.array([1.0, 0.5, 0.2])) is None


def test_proposal_is_pinned(stream, t3):
    path = sdb_propose(stream, t3, 2.0, 3.3, 4.0, 0.2)
    assert path.values[0] == 2.0
    assert path.values[-1] == 3.3
    assert len(path.values) == 21
    assert 0 <= path.splice_index < 20


def test_mh_accepts_from_single_trial(stream, t3):
    state = SdbState(sdb_propose(stream, t3, 2.0, 3.3, 1.0, 0.1), 1)
    assert sdb_mh_update(stream, t3, state, 0.1) is not state


def test_run_sdb_length(stream, t3):
    assert len(run_sdb(stream, t3, 2.0, 3.3, 1.0, 0.1, 0)) == 1
    chain = run_sdb(stream, t3, 2.0, 3.3, 1.0, 0.1, 3)
    assert len(chain) == 4
    assert all(p.values[0] == 2.0 and p.values[-1] == 3.3 for p in chain)


def test_run_sdb_rejects_negative_steps(stream, t3):
    with pytest.raises(ConfigError):
        run_sdb(stream, t3, 2.0, 3.3, 1.0, 0.1, -1)


def test_ensemble_endpoints_agree_with_and_without_paths(t3):
    paths = euler_ensemble(RngStream(3, 1), t3, [0.0, 1.0, -2.0], 1.0, 0.05)
    ends = euler_ensemble(RngStream(3, 1), t3, [0.0, 1.0, -2.0], 1.0, 0.05, keep_path=False)
    assert paths.shape == (3, 21)
    assert list(paths[:, 0]) == [0.0, 1.0, -2.0]
    assert ends.shape == (3,)
    np.testing.assert_allclose(paths[:, -1], ends, rtol=1e-12)


def test_single_path_is_first_ensemble_row(t3):
    path = euler_path(RngStream(3, 2), t3, 0.5, 1.0, 0.1)
    np.testing.assert_array_equal(path.values, euler_ensemble(RngStream(3, 2), t3, 0.5, 1.0, 0.1)[0])


@pytest.mark.slow
def test_fine_grid_brownian_midpoint(bm):
    n = 2000
    mids = [run_sdb(RngStream(31, i), bm, 0.0, 1.0, 1.0, 5e-3, 20)[-1].value_at(0.5) for i in range(n)]
    assert stats.kstest(mids, "norm", args=(0.5, 0.5)).statistic < 0.04
