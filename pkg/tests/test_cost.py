import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cransched.cost import (
    activation_cost,
    bbu_slot_cost,
    horizon_cost,
    rrh_slot_cost,
    schedule_breakdown,
    total_slot_cost,
)
from cransched.model import Schedule, SlotAssignment
from cransched.scenario import default_network

from _util import request

NET = default_network(num_subcarriers=2, horizon=3)


def _slot(R, active, power_on=None, alloc=None):
    H, S = NET.num_rrhs, NET.num_subcarriers
    power = np.zeros((R, H, S))
    a = np.zeros((R, S), bool) if alloc is None else np.asarray(alloc, bool)
    if power_on is not None:
        r, j, s, p = power_on
        power[r, j, s] = p
        a[r, s] = True
    return SlotAssignment(a, np.asarray(active, bool), power)


def test_all_asleep():
    tx, act = rrh_slot_cost(_slot(0, [0] * 5), NET.rrhs)
    assert (tx, act) == (0.0, 375.0)


def test_one_rrh_on():
    tx, act = rrh_slot_cost(_slot(0, [1, 0, 0, 0, 0]), NET.rrhs)
    assert act == 432.0 and tx == 0.0


def test_one_rrh_on_with_power():
    reqs = [request(0, np.ones((5, 2)))]
    tx, act = rrh_slot_cost(_slot(1, [1, 0, 0, 0, 0], (0, 0, 1, 0.5)), NET.rrhs)
    assert tx == pytest.approx(0.5) and act == 432.0


def test_bbu_cost():
    r6 = request(0, np.ones((5, 2)), gamma=1.0)
    r7 = request(1, np.ones((5, 2)), gamma=3.0)
    assert bbu_slot_cost(_slot(2, [0] * 5), [r6, r7], 1.0) == 0.0
    assert bbu_slot_cost(_slot(2, [0] * 5, alloc=[[1, 0], [0, 0]]), [r6, r7], 1.0) == 6.0
    assert bbu_slot_cost(_slot(2, [0] * 5, alloc=[[1, 0], [0, 1]]), [r6, r7], 1.0) == 13.0


def test_total_slot_cost_idle():
    assert total_slot_cost(_slot(0, [0] * 5), [], NET).weighted_total == pytest.approx(3.75)


def test_total_slot_cost_components():
    reqs = [request(0, np.ones((5, 2)), gamma=1.0)]
    bd = total_slot_cost(_slot(1, [1, 0, 0, 0, 0], (0, 0, 0, 0.5)), reqs, NET)
    assert bd.weighted_total == pytest.approx(5.42)
    assert (bd.tx, bd.rrh_activation, bd.bbu) == (pytest.approx(0.5), 432.0, 6.0)


def test_zero_weights_leave_tx():
    net = NET.replace(weight_rrh=0.0, weight_bbu=0.0)
    reqs = [request(0, np.ones((5, 2)), gamma=1.0)]
    bd = total_slot_cost(_slot(1, [1, 1, 0, 0, 0], (0, 1, 0, 0.25)), reqs, net)
    assert bd.weighted_total == bd.tx == pytest.approx(0.25)


def test_empty_horizon():
    assert horizon_cost(Schedule.empty(0, NET), [], NET) == pytest.approx(11.25)


def test_single_slot_horizon_is_slot_cost():
    net = NET.replace(horizon=1)
    reqs = [request(0, np.ones((5, 2)))]
    slot = _slot(1, [0, 1, 1, 0, 0], (0, 2, 1, 0.3))
    assert horizon_cost(Schedule([slot]), reqs, net) == total_slot_cost(slot, reqs, net).weighted_total


@given(st.integers(0, 2**32 - 1))
def test_additivity_and_nonnegativity(seed):
    rng = np.random.default_rng(seed)
    R, T = int(rng.integers(0, 5)), int(rng.integers(1, 6))
    net = NET.replace(horizon=T)
    reqs = [request(i, np.ones((5, 2)), gamma=float(rng.uniform(0, 100))) for i in range(R)]
    slots = []
    for _ in range(T):
        alloc = np.zeros((R, 2), bool)
        for r in range(R):
            if rng.random() < 0.5:
                alloc[r, rng.integers(2)] = True
        active = rng.random(5) < 0.5
        power = rng.uniform(0, 2, (R, 5, 2)) * alloc[:, None, :] * active[None, :, None]
        slots.append(SlotAssignment(alloc, active, power))
    sched = Schedule(slots)
    # independent re-summation straight from the definitions
    expect = 0.0
    for slot in slots:
        tx = slot.power.sum()
        act = sum(r.activation_power + r.fiber_power if on else r.sleep_power for on, r in zip(slot.active, net.rrhs))
        bbu = sum(reqs[r].resources for r in range(R) if slot.alloc[r].any())
        expect += tx + net.weight_rrh * act + net.weight_bbu * net.bbu_power_per_unit * bbu
    assert horizon_cost(sched, reqs, net) == pytest.approx(expect, rel=1e-12)
    bd = schedule_breakdown(sched, reqs, net)
    assert min(bd.tx, bd.rrh_activation, bd.bbu, bd.weighted_total) >= 0
    total = sum((total_slot_cost(s, reqs, net) for s in slots[1:]), total_slot_cost(slots[0], reqs, net))
    assert total.weighted_total == pytest.approx(bd.weighted_total, rel=1e-12)


@given(st.lists(st.booleans(), min_size=5, max_size=5), st.integers(0, 4))
def test_activation_flip_delta(active, j):
    y = np.array(active, bool)
    y[j] = False
    before = activation_cost(y, NET.rrhs)
    y[j] = True
    r = NET.rrhs[j]
    assert activation_cost(y, NET.rrhs) - before == pytest.approx(r.activation_power + r.fiber_power - r.sleep_power)
