"""Polynomial-time online scheduler: greedy orthogonal Phase I, JT/channel-sharing Phase II.

Each slot runs

1. Phase I: every candidate RRH builds an orthogonal schedule (distinct
   subcarriers, one subcarrier per request) by scanning requests in priority
   order ``(q + 1) / xi`` under its power budget; the RRH with the most
   admissions wins (ties: least ``sum xi + P_on + P_fiber``, then lowest id).
   Only RRHs that are epsilon-orthogonal to everything scheduled so far stay
   candidates.
2. Phase II: the residual budget of the Phase I RRHs admits further requests,
   cheapest isolated requirement first, sharing channels.
3. The LP fixes the powers. If it is infeasible, Policy 1 sheds Phase II
   requests (largest xi first) and Policy 2 first switches on extra RRHs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import lp_power
from .model import Network, Request, Schedule, SlotAssignment

POLICIES = (1, 2)


def min_power_requirement(min_sinr: float, gain: float, noise: float) -> float:
    """Isolated power ``gamma * noise / g`` needed on one link; ``inf`` on a dead link."""
    if min_sinr == 0:
        return 0.0
    if gain <= 0:
        return math.inf
    return min_sinr * noise / gain


def priority_metric(waiting: int, xi: float) -> float:
    """``(q + 1) / xi``: large for urgent requests that are cheap to serve."""
    if math.isinf(xi):
        return 0.0
    if xi == 0:
        return math.inf
    return (waiting + 1) / xi


@dataclass
class GreedyState:
    slot: int
    outstanding: list[int]  # request indices
    waiting: dict[int, int]  # request index -> q_r
    epsilon: float = 0.0

    @classmethod
    def at(cls, t: int, outstanding: Sequence[int], requests: Sequence[Request], epsilon: float = 0.0):
        return cls(t, list(outstanding), {i: max(0, t - requests[i].arrival_slot) for i in outstanding}, epsilon)


@dataclass
class PhasePolicy:
    phase1_sched: dict[int, list[tuple[int, int]]] = field(default_factory=dict)  # RRH index -> [(r, s)]
    phase1_active: list[int] = field(default_factory=list)  # in selection order
    phase2_sched: dict[int, list[tuple[int, int]]] = field(default_factory=dict)
    residual: dict[int, float] = field(default_factory=dict)

    def entries(self, xi: np.ndarray, phase: int | None = None) -> list[tuple[int, int, int, float]]:
        """(r, j, s, xi) for every scheduled pair."""
        out = []
        scheds = {1: [self.phase1_sched], 2: [self.phase2_sched], None: [self.phase1_sched, self.phase2_sched]}
        for sched in scheds[phase]:
            for j, pairs in sched.items():
                out.extend((r, j, s, float(xi[r, j, s])) for r, s in pairs)
        return out

    def scheduled_requests(self) -> set[int]:
        return {r for sched in (self.phase1_sched, self.phase2_sched) for pairs in sched.values() for r, _ in pairs}


def xi_tensor(requests: Sequence[Request], network: Network) -> np.ndarray:
    """Isolated power requirements, shape (R, H, S); ``inf`` where the gain is zero."""
    if not requests:
        return np.zeros((0, network.num_rrhs, network.num_subcarriers))
    G = np.stack([r.gains for r in requests])
    gamma = np.array([r.min_sinr for r in requests])[:, None, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.where(G > 0, gamma * network.noise_power / G, np.inf)
    return np.where(gamma == 0, 0.0, xi)


def _admit_orthogonal(j, cands, xi, requests, network, used_m, order, forbid):
    """Step I.2 for one RRH: returns the admitted (r, s) pairs and their xi sum."""
    P = network.rrhs[j].max_power
    items = []
    for r, q in cands:
        for s in range(network.num_subcarriers):
            x = xi[r, j, s]
            if x <= P and (r, s) not in forbid:
                items.append((priority_metric(q, x), r, s, x))
    if order == "priority":
        items.sort(key=lambda it: (-it[0], it[1], it[2]))
    else:
        items.sort(key=lambda it: (it[0], it[1], it[2]))
    taken_r, taken_s, picked, budget, m = set(), set(), [], 0.0, used_m
    cap = network.bbu_capacity * (1 + 1e-12)
    for _, r, s, x in items:
        if r in taken_r or s in taken_s or budget + x > P:
            continue
        if m + requests[r].resources > cap:
            continue
        picked.append((r, s))
        taken_r.add(r)
        taken_s.add(s)
        budget += x
        m += requests[r].resources
    return picked, budget


def phase1(
    state: GreedyState,
    requests: Sequence[Request],
    network: Network,
    *,
    xi: np.ndarray | None = None,
    order: str = "priority",
    candidates: Sequence[int] | None = None,
    orthogonality: bool = True,
) -> PhasePolicy:
    """Greedy orthogonal scheduling for one slot.

    ``candidates`` restricts the RRHs that may be selected (default: all).
    With ``orthogonality=False`` the epsilon filter is skipped, which is how
    the all-on baseline reuses this admission procedure.
    """
    if xi is None:
        xi = xi_tensor(requests, network)
    eps = state.epsilon
    remaining = list(state.outstanding)
    perp = list(range(network.num_rrhs)) if candidates is None else list(candidates)
    pol = PhasePolicy()
    used_m = 0.0
    # (r, s) pairs that an already selected RRH transmits on: a later RRH may
    # only serve request r on s if r's gain from every such RRH is <= eps
    on_air: dict[int, list[int]] = {}

    while perp and remaining:
        if used_m + min(requests[r].resources for r in remaining) > network.bbu_capacity * (1 + 1e-12):
            break
        best = None
        forbid = set()
        if orthogonality:
            for s, rrhs in on_air.items():
                for r in remaining:
                    if any(requests[r].gains[k, s] > eps for k in rrhs):
                        forbid.add((r, s))
        cands = [(r, state.waiting.get(r, 0)) for r in remaining]
        for j in perp:
            picked, spent = _admit_orthogonal(j, cands, xi, requests, network, used_m, order, forbid)
            key = (-len(picked), spent + network.rrhs[j].on_cost, network.rrhs[j].id)
            if best is None or key < best[0]:
                best = (key, j, picked, spent)
        _, j, picked, spent = best
        if not picked:
            break
        pol.phase1_active.append(j)
        pol.phase1_sched[j] = picked
        done = {r for r, _ in picked}
        remaining = [r for r in remaining if r not in done]
        used_m += sum(requests[r].resources for r in done)
        for _, s in picked:
            on_air.setdefault(s, []).append(j)
        perp = [k for k in perp if k != j]
        if orthogonality:
            perp = [k for k in perp if all(requests[r].gains[k, s] <= eps for r, s in picked)]
    for j in pol.phase1_active:
        pol.residual[j] = network.rrhs[j].max_power - sum(float(xi[r, j, s]) for r, s in pol.phase1_sched[j])
    return pol


def phase2(pol: PhasePolicy, remaining: Sequence[int], requests: Sequence[Request], network: Network, *, xi=None) -> PhasePolicy:
    """Admit leftover requests on the residual power of the Phase I RRHs (in place)."""
    if xi is None:
        xi = xi_tensor(requests, network)
    left = list(remaining)
    residual = dict(pol.residual)
    h2 = [j for j in pol.phase1_active if residual[j] > 0]
    used_m = sum(requests[r].resources for r in pol.scheduled_requests())
    cap = network.bbu_capacity * (1 + 1e-12)
    S = network.num_subcarriers
    while h2 and left:
        fits = [r for r in left if used_m + requests[r].resources <= cap]
        if not fits:
            break
        best = None
        for r in fits:
            for j in h2:
                for s in range(S):
                    x = xi[r, j, s]
                    if x < residual[j] and (best is None or (x, r, j, s) < best):
                        best = (x, r, j, s)
        if best is None:
            break
        x, r, j, s = best
        pol.phase2_sched.setdefault(j, []).append((r, s))
        left.remove(r)
        used_m += requests[r].resources
        residual[j] -= x
        if residual[j] <= 0:
            h2.remove(j)
    pol.residual = residual
    return pol


def _slot_from(pairs, active_idx, requests, network):
    R, H, S = len(requests), network.num_rrhs, network.num_subcarriers
    a = np.zeros((R, S), bool)
    for r, s in pairs:
        a[r, s] = True
    y = np.zeros(H, bool)
    y[list(active_idx)] = True
    return a, y


def _try(pairs, active_idx, requests, network):
    a, y = _slot_from(pairs, active_idx, requests, network)
    sol = lp_power.solve_allocation(a, y, requests, network)
    return (SlotAssignment(a, y, sol.power) if sol.feasible else None), a, y


def _policy1(pol, xi, active, requests, network):
    """Shed Phase II entries, largest xi first, until the LP is feasible."""
    p1 = [(r, s) for r, _, s, _ in pol.entries(xi, 1)]
    p2 = sorted(pol.entries(xi, 2), key=lambda e: (e[3], e[0]))
    while True:
        slot, _, _ = _try(p1 + [(r, s) for r, _, s, _ in p2], active, requests, network)
        if slot is not None:
            return slot
        if not p2:
            return None
        p2.pop()


def finalize_slot(
    pol: PhasePolicy,
    state: GreedyState,
    requests: Sequence[Request],
    network: Network,
    policy: int = 1,
    *,
    xi: np.ndarray | None = None,
    order: str = "priority",
) -> SlotAssignment:
    """Turn a two-phase schedule into a feasible slot decision.

    Falls back to a fresh epsilon = 0 run when shedding Phase II requests is
    not enough; that run is feasible by construction.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be 1 or 2, got {policy}")
    if xi is None:
        xi = xi_tensor(requests, network)
    if not pol.phase1_active:
        return SlotAssignment.idle(len(requests), network.num_rrhs, network.num_subcarriers)
    pairs = [(r, s) for r, _, s, _ in pol.entries(xi)]
    active = list(pol.phase1_active)
    slot, _, _ = _try(pairs, active, requests, network)
    if slot is not None:
        return slot
    if policy == 2:
        spare = sorted(
            (j for j in range(network.num_rrhs) if j not in active),
            key=lambda j: (network.rrhs[j].on_cost, network.rrhs[j].id),
        )
        extended = list(active)
        for j in spare:
            extended.append(j)
            slot, _, _ = _try(pairs, extended, requests, network)
            if slot is not None:
                return slot
        # every RRH is on; shed Phase II requests with all of them kept active
        active = extended
    slot = _policy1(pol, xi, active, requests, network)
    if slot is not None:
        return slot
    if state.epsilon > 0:
        zero = GreedyState(state.slot, state.outstanding, state.waiting, 0.0)
        return schedule_slot(zero, requests, network, policy, xi=xi, order=order)
    raise lp_power.SolverError("orthogonal Phase I schedule is LP-infeasible; this should not happen")


def schedule_slot(state, requests, network, policy=1, *, xi=None, order="priority") -> SlotAssignment:
    if xi is None:
        xi = xi_tensor(requests, network)
    pol = phase1(state, requests, network, xi=xi, order=order)
    left = [r for r in state.outstanding if r not in pol.scheduled_requests()]
    phase2(pol, left, requests, network, xi=xi)
    return finalize_slot(pol, state, requests, network, policy, xi=xi, order=order)


def run_online(
    requests: Sequence[Request], network: Network, policy: int = 1, *, order: str = "priority"
) -> Schedule:
    """Slot-by-slot greedy run; requests past their deadline are dropped."""
    requests = list(requests)
    xi = xi_tensor(requests, network)
    served: set[int] = set()
    slots = []
    for t in range(1, network.horizon + 1):
        outstanding = [i for i, r in enumerate(requests) if i not in served and r.in_window(t)]
        if outstanding:
            state = GreedyState.at(t, outstanding, requests, network.epsilon)
            slot = schedule_slot(state, requests, network, policy, xi=xi, order=order)
            served.update(slot.scheduled())
        else:
            slot = SlotAssignment.idle(len(requests), network.num_rrhs, network.num_subcarriers)
        slots.append(slot)
    return Schedule(slots, {requests[i].id for i in served})
