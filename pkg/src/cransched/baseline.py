"""All-on comparison heuristic: every RRH transmits whenever a request is pending."""

from __future__ import annotations

from typing import Sequence

from .greedy_online import GreedyState, _try, phase1, xi_tensor
from .model import Network, Request, Schedule, SlotAssignment


def all_on_schedule(
    outstanding: Sequence[int], requests: Sequence[Request], network: Network, t: int, *, xi=None
) -> SlotAssignment:
    """One slot of the heuristic.

    Subcarriers are assigned with the greedy Phase I admission over all RRHs
    (no orthogonality filter); entries with the largest isolated power
    requirement are dropped until the power LP becomes feasible.
    """
    R, H, S = len(requests), network.num_rrhs, network.num_subcarriers
    if not outstanding:
        return SlotAssignment.idle(R, H, S)
    if xi is None:
        xi = xi_tensor(requests, network)
    state = GreedyState.at(t, outstanding, requests, network.epsilon)
    pol = phase1(state, requests, network, xi=xi, orthogonality=False)
    entries = sorted(pol.entries(xi), key=lambda e: (e[3], e[0]))
    everyone = list(range(H))
    while True:
        slot, a, y = _try([(r, s) for r, _, s, _ in entries], everyone, requests, network)
        if slot is not None:
            return slot
        entries.pop()


def run_heuristic(requests: Sequence[Request], network: Network) -> Schedule:
    requests = list(requests)
    xi = xi_tensor(requests, network)
    served: set[int] = set()
    slots = []
    for t in range(1, network.horizon + 1):
        outstanding = [i for i, r in enumerate(requests) if i not in served and r.in_window(t)]
        slot = all_on_schedule(outstanding, requests, network, t, xi=xi)
        served.update(slot.scheduled())
        slots.append(slot)
    return Schedule(slots, {requests[i].id for i in served})
