"""Weighted power accounting for the RRHs and the BBU pool."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Network, Request, Rrh, Schedule, SlotAssignment


@dataclass(frozen=True)
class CostBreakdown:
    tx: float
    rrh_activation: float
    bbu: float
    weighted_total: float

    def __add__(self, other: "CostBreakdown") -> "CostBreakdown":
        return CostBreakdown(
            self.tx + other.tx,
            self.rrh_activation + other.rrh_activation,
            self.bbu + other.bbu,
            self.weighted_total + other.weighted_total,
        )


def activation_cost(active: np.ndarray, rrhs: Sequence[Rrh]) -> float:
    """Unweighted activation/fiber/sleep power for an activation vector."""
    return math.fsum(r.on_cost if on else r.sleep_power for on, r in zip(active, rrhs))


def rrh_slot_cost(slot: SlotAssignment, rrhs: Sequence[Rrh]) -> tuple[float, float]:
    """Transmit power of active RRHs and their unweighted activation cost."""
    tx = float(slot.power.sum(axis=(0, 2)) @ slot.active.astype(float))
    return tx, activation_cost(slot.active, rrhs)


def bbu_slot_cost(slot: SlotAssignment, requests: Sequence[Request], bbu_power_per_unit: float) -> float:
    if not requests:
        return 0.0
    m = np.array([r.resources for r in requests])
    return bbu_power_per_unit * float(slot.alloc.sum(axis=1) @ m)


def total_slot_cost(slot: SlotAssignment, requests: Sequence[Request], network: Network) -> CostBreakdown:
    tx, act = rrh_slot_cost(slot, network.rrhs)
    bbu = bbu_slot_cost(slot, requests, network.bbu_power_per_unit)
    return CostBreakdown(tx, act, bbu, tx + network.weight_rrh * act + network.weight_bbu * bbu)


def schedule_breakdown(schedule: Schedule, requests: Sequence[Request], network: Network) -> CostBreakdown:
    parts = [total_slot_cost(slot, requests, network) for slot in schedule.slots]
    return CostBreakdown(
        math.fsum(p.tx for p in parts),
        math.fsum(p.rrh_activation for p in parts),
        math.fsum(p.bbu for p in parts),
        math.fsum(p.weighted_total for p in parts),
    )


def horizon_cost(schedule: Schedule, requests: Sequence[Request], network: Network) -> float:
    """Total weighted power over the horizon."""
    return schedule_breakdown(schedule, requests, network).weighted_total
