import math

import numpy as np
import pytest
from scipy import integrate, stats

from confluent.brownian import (
    Bessel3Bridge,
    BridgePath,
    BridgeSegment,
    bb_sample_at,
    bessel3_bridge_at,
    bridge_moments,
    conditioned_pair_at,
    diff_sum_variance,
    fpt_zero,
    no_cross_prob,
    pre_crossing_pair_at,
)
from confluent.errors import ConfigError
from confluent.rngkit import RngStream


def test_bridge_moments_substitution():
    mean, variance = bridge_moments(BridgeSegment(0.0, 2.0, 1.0, 3.0, sigma2=2.0), 1.0)
    assert mean == pytest.approx(2.0)
    assert variance == pytest.approx(1.0)


def test_bridge_moments_pinned_at_start():
    mean, variance = bridge_moments(BridgeSegment(0.0, 1.0, 0.7, 3.0), 1e-12)
    assert mean == pytest.approx(0.7)
    assert variance == pytest.approx(0.0, abs=1e-11)


def test_bridge_sample_variance(stream):
    seg = BridgeSegment(0.0, 1.0, 0.0, 0.0)
    draws = np.array([bb_sample_at(stream, seg, 0.5) for _ in range(100_000)])
    assert abs(draws.var() - 0.25) < 0.006


def test_bridge_sample_outside_open_interval(stream):
    with pytest.raises(ConfigError):
        bb_sample_at(stream, BridgeSegment(0.0, 1.0, 0.0, 0.0), 1.0)


def test_empty_segment_rejected():
    with pytest.raises(ConfigError):
        BridgeSegment(1.0, 1.0, 0.0, 0.0)


def test_no_cross_prob_values():
    assert no_cross_prob(1.0, 1.0, 1.0, 2.0) == pytest.approx(1.0 - math.exp(-1.0))
    assert no_cross_prob(1.0, 2.0, 1.0, 2.0) == pytest.approx(1.0 - math.exp(-2.0))
    assert no_cross_prob(-1.0, -2.0, 1.0, 2.0) == pytest.approx(0.8647, abs=1e-4)
    assert no_cross_prob(100.0, 100.0, 1.0, 2.0) == 1.0


def test_no_cross_prob_requires_same_sign():
    with pytest.raises(ConfigError):
        no_cross_prob(1.0, -1.0, 1.0, 2.0)
    with pytest.raises(ConfigError):
        no_cross_prob(0.0, 1.0, 1.0, 2.0)


def test_fpt_starting_at_zero(stream):
    assert fpt_zero(stream, BridgeSegment(2.0, 3.0, 0.0, 1.0)).tau == 2.0


def test_fpt_ending_at_zero(stream):
    assert fpt_zero(stream, BridgeSegment(2.0, 3.0, 1.0, 0.0)).tau == 3.0


def test_fpt_sign_change_always_crosses(stream):
    seg = BridgeSegment(1.0, 2.5, 0.8, -0.3, sigma2=2.0)
    for _ in range(2000):
        outcome = fpt_zero(stream, seg)
        assert outcome.finite
        assert 1.0 < outcome.tau < 2.5


def test_fpt_same_sign_escape_frequency(stream):
    seg = BridgeSegment(0.0, 1.0, 1.0, 1.0, sigma2=2.0)
    escapes = np.mean([not fpt_zero(stream, seg).finite for _ in range(10_000)])
    assert abs(escapes - no_cross_prob(1.0, 1.0, 1.0, 2.0)) < 0.02


def _hitting_time_cdf(d0, dT, length, sigma2, points=200_001):
    """Loi de l'instant d'atteinte de 0 sachant qu'il a lieu, normalisée par quadrature."""
    s = np.linspace(0.0, length, points)[1:-1]
    log_f = (-1.5 * np.log(s) - d0 ** 2 / (2.0 * sigma2 * s)
             - 0.5 * np.log(length - s) - dT ** 2 / (2.0 * sigma2 * (length - s)))
    cdf = integrate.cumulative_trapezoid(np.exp(log_f - log_f.max()), s, initial=0.0)
    return lambda t: np.interp(t, s, cdf / cdf[-1])


@pytest.mark.slow
@pytest.mark.parametrize("d0, dT, length, sigma2", [
    (1.0, 1.0, 1.0, 2.0),
    (0.8, -0.3, 1.5, 2.0),
    (0.5, 2.0, 3.0, 1.0),
])
def test_fpt_hitting_time_law(d0, dT, length, sigma2):
    stream = RngStream(17, int(10 * length))
    seg = BridgeSegment(2.0, 2.0 + length, d0, dT, sigma2=sigma2)
    taus = []
    while len(taus) < 20_000:
        outcome = fpt_zero(stream, seg)
        if outcome.finite:
            taus.append(outcome.tau - 2.0)
    assert stats.kstest(taus, _hitting_time_cdf(d0, dT, length, sigma2)).statistic < 0.02


def test_diff_sum_variance():
    assert diff_sum_variance(1.0, 0.5, 2.0) == pytest.approx(0.5)
    assert diff_sum_variance(0.7, 0.7, 2.0) == pytest.approx(2.0 * 1.3 * 0.7 / 2.0)
    assert diff_sum_variance(2.0, 1.0, 2.0) == 0.0
    with pytest.raises(ConfigError):
        diff_sum_variance(0.5, 1.0, 2.0)


def test_reveal_is_idempotent(stream):
    path = BridgePath([0.0, 1.0], [0.0, 1.0])
    first = path.reveal(stream, 0.4)
    assert path.reveal(stream, 0.4) == first
    assert len(path) == 3
    assert path.times == [0.0, 0.4, 1.0]


def test_reveal_known_point_does_not_insert(stream):
    path = BridgePath([0.0, 0.5, 1.0], [0.0, 2.0, 1.0])
    assert path.reveal(stream, 0.5) == 2.0
    assert len(path) == 3


def test_reveal_uses_enclosing_neighbours(stream):
    path = BridgePath([0.0, 1.0, 2.0], [5.0, 5.0, -5.0], sigma2=1e-20)
    assert path.reveal(stream, 0.5) == pytest.approx(5.0)
    assert path.reveal(stream, 1.5) == pytest.approx(0.0)


def test_reveal_out_of_range(stream):
    with pytest.raises(ConfigError):
        BridgePath([0.0, 1.0], [0.0, 0.0]).reveal(stream, 1.5)


def test_path_requires_increasing_times():
    with pytest.raises(ConfigError):
        BridgePath([0.0, 0.0], [1.0, 1.0])


def test_bessel_bridge_starts_at_zero(stream):
    assert bessel3_bridge_at(stream, 1.0, 2.0, 0.0) == 0.0


def test_bessel_bridge_is_positive(stream):
    assert all(bessel3_bridge_at(stream, 1.0, 0.0, 0.5) > 0.0 for _ in range(500))


def test_bessel_bridge_consistent_reveals(stream):
    bridge = Bessel3Bridge(2.0, 1.5)
    a = bridge.value_at(stream, 0.8)
    assert bridge.value_at(stream, 0.8) == a
    assert bridge.value_at(stream, 2.0) == pytest.approx(1.5)


def test_conditioned_pair_keeps_order(stream):
    seg1 = BridgeSegment(0.0, 1.0, 0.0, 0.0)
    seg2 = BridgeSegment(0.0, 1.0, 0.5, 0.5)
    for _ in range(300):
        a, b = conditioned_pair_at(stream, seg1, seg2, 0.5)
        assert b > a


def test_conditioned_pair_wide_separation_is_plain_bridge(stream):
    seg1 = BridgeSegment(0.0, 1.0, 0.0, 0.0)
    seg2 = BridgeSegment(0.0, 1.0, 10.0, 10.0)
    draws = np.array([conditioned_pair_at(stream, seg1, seg2, 0.5) for _ in range(5000)])
    assert abs(draws[:, 0].var() - 0.25) < 0.03
    assert abs(draws[:, 1].mean() - 10.0) < 0.03


def test_conditioned_pair_rejects_sign_change(stream):
    with pytest.raises(ConfigError):
        conditioned_pair_at(stream, BridgeSegment(0.0, 1.0, 0.0, 1.0), BridgeSegment(0.0, 1.0, 1.0, 0.0), 0.5)


def test_conditioned_pair_requires_common_interval(stream):
    with pytest.raises(ConfigError):
        conditioned_pair_at(stream, BridgeSegment(0.0, 1.0, 0.0, 0.0), BridgeSegment(0.0, 2.0, 1.0, 1.0), 0.5)


def test_pre_crossing_pair_near_confluence(stream):
    z, x1, x2 = pre_crossing_pair_at(stream, 0.0, 1.0, 0.0, 1.0, 1.0 - 1e-9, 0.5)
    assert z == x1
    assert x1 == pytest.approx(0.5, abs=1e-3)
    assert x2 == pytest.approx(0.5, abs=1e-3)


def test_pre_crossing_pair_near_left_end(stream):
    _, x1, x2 = pre_crossing_pair_at(stream, 0.0, 1.0, 0.0, 1.0, 1e-9, 0.5)
    assert x1 == pytest.approx(0.0, abs=1e-3)
    assert x2 == pytest.approx(1.0, abs=1e-3)


def test_pre_crossing_pair_keeps_side(stream):
    for _ in range(300):
        _, x1, x2 = pre_crossing_pair_at(stream, 0.0, 2.0, 1.0, -1.0, 1.0, 0.3)
        assert x2 <= x1


def test_pre_crossing_pair_outside_interval(stream):
    with pytest.raises(ConfigError):
        pre_crossing_pair_at(stream, 0.0, 1.0, 0.0, 1.0, 1.0, 0.5)
