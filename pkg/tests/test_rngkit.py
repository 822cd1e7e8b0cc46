import math

import numpy as np
import pytest
from scipy import stats

from confluent.errors import CoinCeilingError, ConfigError
from confluent.rngkit import (
    ConstantApproximator,
    RngStream,
    make_streams,
    sample_inverse_gaussian,
    sample_normal,
    sample_poisson_times,
    sample_uniform,
    toss_p_coin,
)


def test_uniform_in_unit_interval(stream):
    draws = [sample_uniform(stream) for _ in range(1000)]
    assert all(0.0 <= u < 1.0 for u in draws)


def test_same_seed_and_id_replay_identically():
    a = RngStream(1, 0)
    b = RngStream(1, 0)
    assert [sample_uniform(a) for _ in range(5)] == [sample_uniform(b) for _ in range(5)]


def test_distinct_stream_ids_differ():
    s0, s1 = make_streams(1, 2)
    assert (s0.stream_id, s1.stream_id) == (0, 1)
    assert sample_uniform(s0) != sample_uniform(s1)


def test_negative_seed_rejected():
    with pytest.raises(ConfigError):
        RngStream(-1, 0)


def test_uniform_mean(stream):
    mean = np.mean([sample_uniform(stream) for _ in range(100_000)])
    assert abs(mean - 0.5) < 0.005


def test_normal_zero_variance_returns_mean(stream):
    assert sample_normal(stream, 3.25, 0.0) == 3.25


def test_normal_negative_variance_rejected(stream):
    with pytest.raises(ConfigError):
        sample_normal(stream, 0.0, -1.0)


def test_normal_sample_variance(stream):
    draws = np.array([sample_normal(stream, 0.0, 1.0) for _ in range(100_000)])
    assert abs(draws.var() - 1.0) < 0.03


def test_normal_affine_is_standard(stream):
    draws = np.array([(sample_normal(stream, 5.0, 4.0) - 5.0) / 2.0 for _ in range(10_000)])
    assert stats.kstest(draws, "norm").pvalue > 1e-3


def test_inverse_gaussian_mean(stream):
    draws = np.array([sample_inverse_gaussian(stream, 1.0, 1.0) for _ in range(100_000)])
    assert abs(draws.mean() - 1.0) < 0.016


def test_inverse_gaussian_moments(stream):
    mu, lam, n = 2.0, 3.0, 100_000
    draws = np.array([sample_inverse_gaussian(stream, mu, lam) for _ in range(n)])
    variance = mu ** 3 / lam
    assert abs(draws.mean() - mu) < 4 * math.sqrt(variance / n)
    assert abs(draws.var() - variance) < 0.15


def test_inverse_gaussian_concentrates_for_large_lambda(stream):
    draws = [sample_inverse_gaussian(stream, 1.0, 1e6) for _ in range(1000)]
    assert all(abs(x - 1.0) < 0.01 for x in draws)


def test_inverse_gaussian_requires_positive_parameters(stream):
    with pytest.raises(ConfigError):
        sample_inverse_gaussian(stream, 0.0, 1.0)


def test_poisson_zero_rate_is_empty(stream):
    assert sample_poisson_times(stream, 0.0, 0.0, 10.0) == []


def test_poisson_times_sorted_inside_interval(stream):
    times = sample_poisson_times(stream, 5.0, 1.0, 3.0)
    assert times == sorted(times)
    assert all(1.0 < t < 3.0 for t in times)


def test_poisson_mean_count(stream):
    counts = [len(sample_poisson_times(stream, 2.0, 0.0, 10.0)) for _ in range(10_000)]
    assert abs(np.mean(counts) - 20.0) < 0.2


def test_coin_with_injected_uniform(stream):
    # ε = 0.5·2^-n : décision au rang 2, où 0.3 < 0.5 - 0.125
    assert toss_p_coin(stream, ConstantApproximator(0.5, eps0=0.5), u=0.3) == 1
    assert toss_p_coin(stream, ConstantApproximator(0.5, eps0=0.5), u=0.8) == 0


def test_coin_with_zero_probability_never_lands_heads(stream):
    assert not any(toss_p_coin(stream, ConstantApproximator(0.0)) for _ in range(1000))


def test_coin_frequency(stream):
    heads = np.mean([toss_p_coin(stream, ConstantApproximator(0.37)) for _ in range(100_000)])
    assert abs(heads - 0.37) < 0.007


def test_coin_consumes_one_uniform():
    a, b = RngStream(3, 0), RngStream(3, 0)
    toss_p_coin(a, ConstantApproximator(0.37))
    sample_uniform(b)
    assert sample_uniform(a) == sample_uniform(b)


def test_coin_ceiling_reached(stream):
    with pytest.raises(CoinCeilingError):
        toss_p_coin(stream, ConstantApproximator(0.5), ceiling=3, u=0.5)


def test_coin_undecidable_below_machine_epsilon(stream):
    with pytest.raises(CoinCeilingError):
        toss_p_coin(stream, ConstantApproximator(0.5), u=0.5)


def test_coin_skips_infinite_bound(stream):
    assert toss_p_coin(stream, [(0.5, math.inf), (0.5, 0.1)], u=0.3) == 1


def test_coin_rejects_nan_bound(stream):
    with pytest.raises(CoinCeilingError):
        toss_p_coin(stream, [(0.5, math.nan)], u=0.3)


def test_coin_exhausted_approximator(stream):
    with pytest.raises(CoinCeilingError):
        toss_p_coin(stream, [(0.5, 0.4)], u=0.3)


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.05, 0.37, 0.5, 0.95])
def test_coin_frequency_across_probabilities(p):
    stream = RngStream(9, int(p * 100))
    heads = np.mean([toss_p_coin(stream, ConstantApproximator(p)) for _ in range(100_000)])
    assert abs(heads - p) < 4 * math.sqrt(p * (1 - p) / 100_000)


def test_injected_uniform_matches_decision_rule():
    stream = RngStream(9, 0)
    for u in np.linspace(0.0005, 0.9995, 1000):
        assert toss_p_coin(stream, ConstantApproximator(0.37), u=float(u)) == int(u < 0.37)
