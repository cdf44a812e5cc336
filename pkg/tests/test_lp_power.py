import itertools

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from cransched.lp_power import INFEASIBLE, OPTIMAL, build_problem, solve, solve_allocation
from cransched.model import SlotAssignment, StructuralError, sinr_matrix

from _util import P48, network, request

scipy_optimize = pytest.importorskip("scipy.optimize")


def test_empty_problem():
    net = network(H=2, S=2)
    reqs = [request(0, np.ones((2, 2)))]
    prob = build_problem(np.zeros((1, 2), bool), np.ones(2, bool), reqs, net)
    assert prob.num_variables == 0 and prob.num_constraints == 0
    sol = solve(prob)
    assert sol.feasible and sol.objective == 0.0


def test_counts_single():
    net = network(H=1, S=1)
    prob = build_problem([[True]], [True], [request(0, [[1e-10]])], net)
    assert (prob.num_variables, prob.num_constraints) == (1, 2)


def test_counts_shared_channel():
    net = network(H=2, S=1)
    reqs = [request(0, [[1e-10], [1e-11]]), request(1, [[1e-11], [1e-10]])]
    prob = build_problem([[True], [True]], [True, True], reqs, net)
    assert (prob.num_variables, prob.num_constraints) == (4, 4)


def test_closed_form_single_link():
    net = network(H=1, S=1)
    sol = solve_allocation([[True]], [True], [request(0, [[1e-10]], gamma=1.0)], net)
    assert sol.status == OPTIMAL
    assert sol.power[0, 0, 0] == pytest.approx(1e-3, abs=1e-12)
    assert sol.objective == pytest.approx(1e-3, abs=1e-12)


def test_unreachable_target_is_infeasible():
    net = network(H=1, S=1)
    g = 1e-13 / (2 * P48)  # needs 2 P_j
    assert solve_allocation([[True]], [True], [request(0, [[g]])], net).status == INFEASIBLE


def test_decoupled_requests_sum():
    net = network(H=2, S=2)
    g0, g1 = 2e-10, 5e-11
    reqs = [request(0, [[g0, 0.0], [0.0, 0.0]], gamma=2.0), request(1, [[0.0, 0.0], [0.0, g1]], gamma=3.0)]
    sol = solve_allocation([[True, False], [False, True]], [True, True], reqs, net)
    assert sol.objective == pytest.approx(2 * 1e-13 / g0 + 3 * 1e-13 / g1, rel=1e-12)


def test_inactive_rrh_carries_no_power():
    net = network(H=2, S=1)
    reqs = [request(0, [[1e-10], [1e-9]])]
    sol = solve_allocation([[True]], [True, False], reqs, net)
    assert sol.power[0, 1, 0] == 0.0
    assert sol.power[0, 0, 0] == pytest.approx(1e-3)


def test_zero_target_gets_no_power():
    net = network(H=1, S=1)
    sol = solve_allocation([[True]], [True], [request(0, [[1e-10]], gamma=0.0)], net)
    assert sol.feasible and sol.objective == 0.0


def test_rejects_bad_shapes():
    net = network(H=1, S=2)
    reqs = [request(0, [[1e-10, 1e-10]])]
    with pytest.raises(StructuralError):
        build_problem(np.ones((1, 3), bool), [True], reqs, net)
    with pytest.raises(StructuralError):
        build_problem(np.ones((1, 2), bool), [True], reqs, net)


def _random_problem(rng, max_r=5, max_h=3, max_s=2):
    H, S, R = int(rng.integers(1, max_h + 1)), int(rng.integers(1, max_s + 1)), int(rng.integers(1, max_r + 1))
    net = network(H=H, S=S, T=3, capacity=100.0)
    reqs = [request(i, 10 ** rng.uniform(-13, -8, (H, S)), gamma=10 ** rng.uniform(0, 2)) for i in range(R)]
    alloc = np.zeros((R, S), bool)
    alloc[np.arange(R), rng.integers(0, S, R)] = True
    active = rng.random(H) < 0.8
    return net, reqs, alloc, active


def _raw_constraints(prob):
    """Rows A p >= b (SINR) and C p <= d (caps) in watts, variables ordered (k, a)."""
    K, A = prob.gains.shape
    G, gam = [], []
    for k, (r, s) in enumerate(prob.scheduled):
        row = np.zeros(K * A)
        for a in range(A):
            row[k * A + a] += prob.gains[k, a]
            for k2, (_, s2) in enumerate(prob.scheduled):
                if k2 != k and s2 == s:
                    row[k2 * A + a] -= prob.sinr_targets[k] * prob.gains[k, a]
        G.append(row)
        gam.append(prob.sinr_targets[k] * prob.noise)
    C = np.zeros((A, K * A))
    for a in range(A):
        C[a, a::A] = 1.0
    return np.array(G), np.array(gam), C, prob.caps


@given(st.integers(0, 2**32 - 1))
def test_matches_highs(seed):
    rng = np.random.default_rng(seed)
    net, reqs, alloc, active = _random_problem(rng)
    prob = build_problem(alloc, active, reqs, net)
    sol = solve(prob)
    K, A = prob.gains.shape
    if A == 0:
        assert not sol.feasible
        return
    G, b, C, d = _raw_constraints(prob)
    scale = b[:, None]
    ref = scipy_optimize.linprog(
        np.ones(K * A),
        A_ub=np.vstack([-G / scale, C / d[:, None]]),
        b_ub=np.concatenate([-np.ones(K), np.ones(A)]),
        bounds=(0, None),
        method="highs",
    )
    assume(ref.status in (0, 2))  # skip cases HiGHS itself flags as numerically troubled
    if ref.status == 2:
        assert not sol.feasible
        return
    assert sol.feasible
    assert sol.objective == pytest.approx(ref.fun, rel=1e-6)
    # active-constraint property and caps, measured on the returned powers
    slot = SlotAssignment(alloc, active, sol.power)
    sinr = sinr_matrix(slot, reqs, net.noise_power)
    for r, s in prob.scheduled:
        assert sinr[r, s] == pytest.approx(reqs[r].min_sinr, rel=1e-6)
    assert np.all(sol.power.sum(axis=(0, 2)) <= net.max_powers * active + 1e-9)


def _vertex_oracle(prob):
    """Exact LP minimum by enumerating basic solutions (n <= 3 variables)."""
    G, b, C, d = _raw_constraints(prob)
    n = G.shape[1]
    rows = np.vstack([G, -C, np.eye(n)])
    rhs = np.concatenate([b, -d, np.zeros(n)])
    best = None
    for idx in itertools.combinations(range(len(rows)), n):
        M = rows[list(idx)]
        if abs(np.linalg.det(M)) < 1e-300:
            continue
        try:
            p = np.linalg.solve(M, rhs[list(idx)])
        except np.linalg.LinAlgError:
            continue
        if np.all(rows @ p >= rhs - 1e-9 * np.abs(rhs) - 1e-30) and np.all(p >= -1e-18):
            if best is None or p.sum() < best:
                best = p.sum()
    return best


@given(st.integers(0, 2**32 - 1))
def test_small_problems_match_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    shapes = [(1, 1), (1, 2), (1, 3), (2, 1), (3, 1)]  # (requests, RRHs) on one channel
    R, H = shapes[rng.integers(len(shapes))]
    net = network(H=H, S=1, capacity=100.0, max_power=float(rng.choice([1e-3, 1e-2, P48])))
    reqs = [request(i, 10 ** rng.uniform(-11, -9, (H, 1)), gamma=10 ** rng.uniform(-0.5, 1)) for i in range(R)]
    prob = build_problem(np.ones((R, 1), bool), np.ones(H, bool), reqs, net)
    sol = solve(prob)
    oracle = _vertex_oracle(prob)
    if oracle is None:
        assert not sol.feasible
    else:
        assert sol.feasible
        assert sol.objective == pytest.approx(oracle, rel=1e-4)


@given(st.integers(0, 2**32 - 1))
def test_infeasibility_certificate_single_request(seed):
    rng = np.random.default_rng(seed)
    H = int(rng.integers(1, 4))
    net = network(H=H, S=1, max_power=float(10 ** rng.uniform(-4, 0)))
    req = request(0, 10 ** rng.uniform(-12, -9, (H, 1)), gamma=10 ** rng.uniform(0, 2))
    sol = solve_allocation([[True]], np.ones(H, bool), [req], net)
    best_sinr = float(req.gains[:, 0] @ net.max_powers) / net.noise_power  # every RRH at its cap
    if sol.feasible:
        assert best_sinr >= req.min_sinr * (1 - 1e-9)
        # fill RRHs in order of decreasing gain until the target is met
        need, total = req.min_sinr * net.noise_power, 0.0
        for j in np.argsort(-req.gains[:, 0], kind="stable"):
            p = min(net.max_powers[j], need / req.gains[j, 0])
            total += p
            need -= p * req.gains[j, 0]
            if need <= 0:
                break
        assert sol.objective == pytest.approx(total, rel=1e-9)
    else:
        assert best_sinr < req.min_sinr * (1 + 1e-9)
