import numpy as np
import pytest
from hypothesis import given, strategies as st

from cransched.scenario import (
    ScenarioConfig,
    default_network,
    gen_channel_gains,
    gen_requests,
    make_instance,
    path_gain,
    place_users,
)


def test_default_network_constants():
    net = default_network()
    assert net.rrh_ids == [1, 2, 3, 4, 5]
    assert [r.fiber_power for r in net.rrhs] == [2, 1, 1, 2, 1]
    assert all(r.max_power == pytest.approx(63.0957, rel=1e-5) for r in net.rrhs)
    assert all((r.activation_power, r.sleep_power) == (130, 75) for r in net.rrhs)
    assert net.rrhs[2].position == (0.0, 0.0)
    assert (net.weight_rrh, net.weight_bbu, net.vm_base, net.theta) == (0.01, 0.1, 5, 1)


def test_place_users_empty():
    assert place_users(0, 500, np.random.default_rng(0)).shape == (0, 2)


def test_place_users_area_uniform():
    pts = place_users(100_000, 500.0, np.random.default_rng(1))
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert r.max() <= 500.0
    assert r.mean() == pytest.approx(2 / 3 * 500.0, rel=0.01)


@given(st.floats(1.0, 5000.0))
def test_path_gain_slope(d):
    eta = 37.6 / 10
    assert path_gain(2 * d) / path_gain(d) == pytest.approx(2.0**-eta, rel=1e-9)


def test_path_gain_reference_point():
    assert path_gain(1000.0) == pytest.approx(10 ** (-12.81))
    assert path_gain(0.0) == path_gain(1.0)  # clamped


def test_fading_unit_mean():
    g = gen_channel_gains([[300.0, 400.0]], [[0.0, 0.0]], 100_000, np.random.default_rng(2))
    assert g.shape == (1, 1, 100_000)
    assert g.mean() / path_gain(500.0) == pytest.approx(1.0, rel=0.02)


def test_gains_zero_users():
    g = gen_channel_gains(np.zeros((0, 2)), [[0, 0], [1, 1]], 3, np.random.default_rng(0))
    assert g.shape == (0, 2, 3)


def test_arrival_extremes():
    net = default_network()
    assert make_instance(ScenarioConfig(arrival_prob=0.0), net, 3) == []
    assert len(make_instance(ScenarioConfig(arrival_prob=1.0, max_users=7), net, 3)) == 7


def test_binomial_mean():
    net = default_network()
    cfg = ScenarioConfig(max_users=30, arrival_prob=0.5)
    rng = np.random.default_rng(5)
    counts = [len(gen_requests(cfg, net, rng)) for _ in range(10_000)]
    assert np.mean(counts) == pytest.approx(15.0, rel=0.02)


@given(st.integers(0, 10_000), st.sampled_from(["end-of-horizon", "fixed", "uniform"]), st.integers(1, 10))
def test_requests_are_valid(seed, policy, T):
    net = default_network(num_subcarriers=3, horizon=T)
    cfg = ScenarioConfig(max_users=10, deadline_policy=policy, deadline_window=(1, 3), min_sinr_db=10.0)
    reqs = make_instance(cfg, net, seed)
    for r in reqs:
        assert 1 <= r.arrival_slot <= T
        assert r.deadline <= T
        assert r.gains.shape == (5, 3) and np.all(r.gains > 0)
        assert r.min_sinr == pytest.approx(10.0) and r.resources == pytest.approx(5 + np.log2(11))
        if policy == "end-of-horizon":
            assert r.deadline == T


def test_deterministic():
    net = default_network()
    a = make_instance(ScenarioConfig(), net, 9)
    b = make_instance(ScenarioConfig(), net, 9)
    assert [(r.user_id, r.arrival_slot, r.window_len) for r in a] == [(r.user_id, r.arrival_slot, r.window_len) for r in b]
    assert all(np.array_equal(x.gains, y.gains) for x, y in zip(a, b))


def test_common_random_numbers_across_gamma_and_p():
    net = default_network()
    lo = make_instance(ScenarioConfig(min_sinr_db=0.0, arrival_prob=1.0), net, 4)
    hi = make_instance(ScenarioConfig(min_sinr_db=20.0, arrival_prob=1.0), net, 4)
    assert all(np.array_equal(x.gains, y.gains) and x.arrival_slot == y.arrival_slot for x, y in zip(lo, hi))
    some = make_instance(ScenarioConfig(arrival_prob=0.5), net, 4)
    by_user = {r.user_id: r for r in lo}
    assert all(np.array_equal(r.gains, by_user[r.user_id].gains) for r in some)


def test_per_slot_arrivals():
    net = default_network(num_subcarriers=8, horizon=10)
    cfg = ScenarioConfig(max_users=15, arrival_prob=1.0, arrival_mode="per-slot")
    reqs = make_instance(cfg, net, 0)
    assert len(reqs) == 150
    assert np.bincount([r.arrival_slot for r in reqs], minlength=11)[1:].tolist() == [15] * 10


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(arrival_prob=1.5)
    with pytest.raises(ValueError):
        ScenarioConfig(deadline_policy="never")
    with pytest.raises(ValueError):
        ScenarioConfig(arrival_mode="bursty")
