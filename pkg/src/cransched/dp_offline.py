"""Optimal offline scheduling by backward induction over outstanding-request sets.

The state at slot ``t`` is the bitmask of requests that are still
unscheduled. Requests that have not arrived yet sit in the mask too; they are
simply not eligible until their arrival slot. A request that reaches its
deadline unscheduled kills the branch, so expired requests never appear in a
reachable state.

Per-slot costs do not depend on ``t`` (block fading), so for each
subcarrier assignment the best activation vector and its LP solution are
computed once and shared by every state and slot.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import lp_power
from .cost import activation_cost, horizon_cost
from .model import Network, Request, Schedule, SlotAssignment

MAX_REQUESTS = 12
MAX_RRHS = 6
BRUTE_FORCE_LIMITS = dict(requests=4, horizon=3, rrhs=3)


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DpState:
    slot: int
    outstanding: int  # bitmask over request indices


@dataclass
class DpSolution:
    schedule: Schedule
    cost: float
    explored_states: int = 0
    lp_solves: int = 0


@dataclass(eq=False)
class _SlotEvaluator:
    """Caches the best activation vector (and its powers) per subcarrier assignment."""

    requests: Sequence[Request]
    network: Network
    masks: list = field(init=False)
    cache: dict = field(default_factory=dict)
    lp_solves: int = 0

    def __post_init__(self):
        H = self.network.num_rrhs
        self.masks = [np.array(y, bool) for y in itertools.product((0, 1), repeat=H)]
        self._act_cost = [self.network.weight_rrh * activation_cost(y, self.network.rrhs) for y in self.masks]
        self._m = np.array([r.resources for r in self.requests])

    def alloc_matrix(self, assignment: tuple[tuple[int, int], ...]) -> np.ndarray:
        a = np.zeros((len(self.requests), self.network.num_subcarriers), bool)
        for r, s in assignment:
            a[r, s] = True
        return a

    def best(self, assignment: tuple[tuple[int, int], ...]):
        """(cost, y index, PowerSolution) minimising the slot cost, or None if infeasible.

        ``assignment`` is a sorted tuple of (request index, subcarrier).
        Activation vectors are scanned in lexicographic order and only a
        strictly cheaper one replaces the incumbent.
        """
        hit = self.cache.get(assignment)
        if hit is not None or assignment in self.cache:
            return hit
        alloc = self.alloc_matrix(assignment)
        bbu = self.network.weight_bbu * self.network.bbu_power_per_unit * sum(self._m[r] for r, _ in assignment)
        result = None
        if assignment:
            # more active RRHs never shrink the feasible set
            full = lp_power.solve_allocation(alloc, self.masks[-1], self.requests, self.network)
            self.lp_solves += 1
            if not full.feasible:
                self.cache[assignment] = None
                return None
        for yi, y in enumerate(self.masks):
            if assignment:
                if not y.any():
                    continue
                if yi == len(self.masks) - 1:
                    sol = full
                else:
                    sol = lp_power.solve_allocation(alloc, y, self.requests, self.network)
                    self.lp_solves += 1
                if not sol.feasible:
                    continue
                psi = sol.objective
            else:
                sol, psi = None, 0.0
            c = psi + self._act_cost[yi] + bbu
            if result is None or c < result[0] - 1e-12 * max(1.0, abs(c)):
                result = (c, yi, sol)
        self.cache[assignment] = result
        return result

    def slot_assignment(self, assignment, yi: int, sol) -> SlotAssignment:
        R, H, S = len(self.requests), self.network.num_rrhs, self.network.num_subcarriers
        power = sol.power if sol is not None else np.zeros((R, H, S))
        return SlotAssignment(self.alloc_matrix(assignment), self.masks[yi], power)


def _check_size(requests, network, allow_large):
    if allow_large:
        return
    if len(requests) > MAX_REQUESTS or network.num_rrhs > MAX_RRHS:
        raise InstanceTooLarge(
            f"{len(requests)} requests / {network.num_rrhs} RRHs exceed the exact-solver guard "
            f"({MAX_REQUESTS} / {MAX_RRHS}); pass allow_large=True to override"
        )


def _eligible(state: DpState, requests: Sequence[Request]) -> tuple[list[int], list[int]]:
    """(eligible request indices, those whose deadline is this slot)."""
    elig = [i for i, r in enumerate(requests) if state.outstanding >> i & 1 and r.in_window(state.slot)]
    due = [i for i in elig if requests[i].deadline == state.slot]
    return elig, due


def _assignments(elig, due, requests, network) -> Iterator[tuple[tuple[int, int], ...]]:
    """Subcarrier assignments of eligible requests, lexicographic in the per-request choice vector.

    Choice 0 leaves a request for later, choice s+1 puts it on subcarrier s.
    Requests due now must be scheduled; the BBU capacity filter applies.
    """
    S = network.num_subcarriers
    options = [range(1, S + 1) if i in due else range(S + 1) for i in elig]
    for choice in itertools.product(*options):
        used = sum(requests[i].resources for i, c in zip(elig, choice) if c)
        if used > network.bbu_capacity * (1 + 1e-12):
            continue
        yield tuple((i, c - 1) for i, c in zip(elig, choice) if c)


def enumerate_actions(
    state: DpState, requests: Sequence[Request], network: Network
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Every admissible (a(t), y(t)) pair for a state.

    Activation vectors vary slowest, both in lexicographic order.
    """
    elig, due = _eligible(state, requests)
    assigns = list(_assignments(elig, due, requests, network))
    R, S = len(requests), network.num_subcarriers
    for y in itertools.product((0, 1), repeat=network.num_rrhs):
        y = np.array(y, bool)
        for assignment in assigns:
            a = np.zeros((R, S), bool)
            for r, s in assignment:
                a[r, s] = True
            yield a, y


def _full_mask(n: int) -> int:
    return (1 << n) - 1


def _build_schedule(policy, start_mask, requests, network, ev: _SlotEvaluator) -> Schedule:
    slots = []
    mask = start_mask
    for t in range(1, network.horizon + 1):
        assignment, yi, sol = policy[(t, mask)]
        slots.append(ev.slot_assignment(assignment, yi, sol))
        for r, _ in assignment:
            mask &= ~(1 << r)
    return Schedule(slots, {requests[i].id for i in range(len(requests))})


def solve_offline(
    requests: Sequence[Request], network: Network, *, allow_large: bool = False
) -> DpSolution | None:
    """Minimum weighted-power schedule serving every request in its window, or None if infeasible.

    Raises:
        InstanceTooLarge: beyond the size guard unless ``allow_large`` is set.
    """
    _check_size(requests, network, allow_large)
    requests = list(requests)
    T = network.horizon
    if any(r.arrival_slot > T for r in requests):
        return None
    ev = _SlotEvaluator(requests, network)
    memo: dict[tuple[int, int], float] = {}
    policy: dict[tuple[int, int], tuple] = {}

    def J(t: int, mask: int) -> float:
        if t > T:
            return 0.0 if mask == 0 else math.inf
        key = (t, mask)
        if key in memo:
            return memo[key]
        elig, due = _eligible(DpState(t, mask), requests)
        # a request whose window closed before t without being served
        stale = any(requests[i].deadline < t for i in range(len(requests)) if mask >> i & 1)
        best = math.inf
        best_key = None
        if not stale:
            for assignment in _assignments(elig, due, requests, network):
                slot = ev.best(assignment)
                if slot is None:
                    continue
                nxt = mask
                for r, _ in assignment:
                    nxt &= ~(1 << r)
                tail = J(t + 1, nxt)
                if tail == math.inf:
                    continue
                c = slot[0] + tail
                placed = dict(assignment)
                tie_key = (ev.masks[slot[1]].tolist(), [placed.get(i, -1) + 1 for i in elig])
                if c < best - 1e-12 * max(1.0, abs(c)) or (
                    best_key is not None and abs(c - best) <= 1e-12 * max(1.0, abs(c)) and tie_key < best_key[0]
                ):
                    best = c
                    best_key = (tie_key, (assignment, slot[1], slot[2]))
        memo[key] = best
        if best_key is not None:
            policy[key] = best_key[1]
        return best

    start = _full_mask(len(requests))
    total = J(1, start)
    if total == math.inf:
        return None
    schedule = _build_schedule(policy, start, requests, network, ev)
    return DpSolution(schedule, horizon_cost(schedule, requests, network), len(memo), ev.lp_solves)


def feasibility_test(requests: Sequence[Request], network: Network, *, allow_large: bool = False) -> bool:
    """True iff some schedule serves every request within its window.

    Same recursion as :func:`solve_offline` with a zero objective; the search
    stops at the first feasible completion. An assignment is SINR-feasible
    iff it is feasible with every RRH switched on.
    """
    _check_size(requests, network, allow_large)
    requests = list(requests)
    T = network.horizon
    all_on = np.ones(network.num_rrhs, bool)
    lp_ok: dict = {}
    dead: set = set()

    def ok(assignment) -> bool:
        if not assignment:
            return True
        if assignment not in lp_ok:
            a = np.zeros((len(requests), network.num_subcarriers), bool)
            for r, s in assignment:
                a[r, s] = True
            lp_ok[assignment] = lp_power.solve_allocation(a, all_on, requests, network).feasible
        return lp_ok[assignment]

    def reach(t: int, mask: int) -> bool:
        if t > T:
            return mask == 0
        if (t, mask) in dead:
            return False
        if not any(requests[i].deadline < t for i in range(len(requests)) if mask >> i & 1):
            elig, due = _eligible(DpState(t, mask), requests)
            for assignment in _assignments(elig, due, requests, network):
                if not ok(assignment):
                    continue
                nxt = mask
                for r, _ in assignment:
                    nxt &= ~(1 << r)
                if reach(t + 1, nxt):
                    return True
        dead.add((t, mask))
        return False

    return reach(1, _full_mask(len(requests)))


def brute_force(requests: Sequence[Request], network: Network) -> DpSolution | None:
    """Exhaustive search over every horizon-wide placement of requests.

    Each request picks one (slot, subcarrier) in its window; every combination
    that respects the BBU capacity is priced slot by slot with every
    activation vector. The total is a sum of per-slot terms, so the minimum
    over all activation sequences is the sum of per-slot minima.

    Raises:
        InstanceTooLarge: beyond 4 requests, 3 slots or 3 RRHs.
    """
    lim = BRUTE_FORCE_LIMITS
    if len(requests) > lim["requests"] or network.horizon > lim["horizon"] or network.num_rrhs > lim["rrhs"]:
        raise InstanceTooLarge(f"brute force is limited to {lim}")
    requests = list(requests)
    T, S, H = network.horizon, network.num_subcarriers, network.num_rrhs
    R = len(requests)
    ys = [np.array(y, bool) for y in itertools.product((0, 1), repeat=H)]
    act = [network.weight_rrh * activation_cost(y, network.rrhs) for y in ys]
    m = [r.resources for r in requests]
    choices = [
        [(t, s) for t in range(max(1, r.arrival_slot), min(T, r.deadline) + 1) for s in range(S)] for r in requests
    ]
    slot_cache: dict = {}

    def slot_min(placed: tuple):
        # placed: sorted ((r, s), ...) scheduled in one slot
        if placed in slot_cache:
            return slot_cache[placed]
        a = np.zeros((R, S), bool)
        for r, s in placed:
            a[r, s] = True
        bbu = network.weight_bbu * network.bbu_power_per_unit * sum(m[r] for r, _ in placed)
        best = None
        for yi, y in enumerate(ys):
            if placed:
                sol = lp_power.solve_allocation(a, y, requests, network)
                if not sol.feasible:
                    continue
                c = sol.objective + act[yi] + bbu
            else:
                sol, c = None, act[yi] + bbu
            if best is None or c < best[0]:
                best = (c, a, y, sol)
        slot_cache[placed] = best
        return best

    best_total, best_slots = math.inf, None
    for combo in itertools.product(*choices):
        per_slot = [[] for _ in range(T)]
        for r, (t, s) in enumerate(combo):
            per_slot[t - 1].append((r, s))
        if any(sum(m[r] for r, _ in p) > network.bbu_capacity * (1 + 1e-12) for p in per_slot):
            continue
        parts = [slot_min(tuple(p)) for p in per_slot]
        if any(p is None for p in parts):
            continue
        total = math.fsum(p[0] for p in parts)
        if total < best_total:
            best_total, best_slots = total, parts
    if best_slots is None:
        return None
    slots = [
        SlotAssignment(a, y, sol.power if sol is not None else np.zeros((R, H, S))) for _, a, y, sol in best_slots
    ]
    schedule = Schedule(slots, {r.id for r in requests})
    return DpSolution(schedule, horizon_cost(schedule, requests, network), 0, len(slot_cache))
