"""Domain types for a C-RAN scheduling instance, SINR evaluation and constraint checks.

Conventions used throughout the package:

* slots are 1-based (``1..T``); ``Schedule.slots[t - 1]`` holds slot ``t``
* RRH ids are whatever the :class:`Rrh` objects carry, but every array axis
  over RRHs follows the order of ``Network.rrhs``
* subcarriers are 0-based array indices
* arrays over requests follow the order of the ``requests`` list handed to
  each function, not the request ids
* SINR targets and gains are linear; dB only appears at the config boundary
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np


class StructuralError(ValueError):
    """Array shapes or ids do not line up with the instance."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def resources_for_request(min_sinr: float, vm_base: float, theta: float) -> float:
    """Compute units needed by the VM serving a request: ``m_VM + theta * log2(1 + gamma)``."""
    if min_sinr < 0:
        raise ValueError(f"min_sinr must be non-negative, got {min_sinr}")
    return vm_base + theta * math.log2(1.0 + min_sinr)


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Request:
    id: int
    user_id: int
    arrival_slot: int
    window_len: int
    min_sinr: float
    resources: float
    gains: np.ndarray  # (H, S), linear power gains

    def __post_init__(self):
        object.__setattr__(self, "gains", _frozen(self.gains))
        if self.gains.ndim != 2:
            raise StructuralError(f"request {self.id}: gains must be 2-D (RRH x subcarrier)")
        if self.arrival_slot < 1 or self.window_len < 0:
            raise ValueError(f"request {self.id}: bad window ({self.arrival_slot}, {self.window_len})")
        if self.min_sinr < 0 or self.resources < 0:
            raise ValueError(f"request {self.id}: negative SINR target or resources")
        if np.any(self.gains < 0):
            raise ValueError(f"request {self.id}: negative channel gain")

    @property
    def deadline(self) -> int:
        """Last slot in which the request may be served."""
        return self.arrival_slot + self.window_len

    def in_window(self, t: int) -> bool:
        return self.arrival_slot <= t <= self.deadline


@dataclass(frozen=True)
class Rrh:
    id: int
    max_power: float
    activation_power: float = 130.0
    sleep_power: float = 75.0
    fiber_power: float = 1.0
    position: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.max_power <= 0:
            raise ValueError(f"RRH {self.id}: max_power must be positive")
        if min(self.activation_power, self.sleep_power, self.fiber_power) < 0:
            raise ValueError(f"RRH {self.id}: power constants must be non-negative")

    @property
    def on_cost(self) -> float:
        return self.activation_power + self.fiber_power


@dataclass(frozen=True)
class Network:
    rrhs: tuple[Rrh, ...]
    num_subcarriers: int
    horizon: int
    bbu_capacity: float
    bbu_power_per_unit: float = 1.0
    noise_power: float = 1e-13
    weight_rrh: float = 0.01
    weight_bbu: float = 0.1
    vm_base: float = 5.0
    theta: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rrhs", tuple(self.rrhs))
        if self.num_subcarriers < 1 or self.horizon < 1:
            raise ValueError("num_subcarriers and horizon must be >= 1")
        if self.bbu_capacity <= 0 or self.noise_power <= 0:
            raise ValueError("bbu_capacity and noise_power must be positive")
        if self.weight_rrh < 0 or self.weight_bbu < 0 or self.theta < 0 or self.epsilon < 0:
            raise ValueError("weights, theta and epsilon must be non-negative")
        if len({r.id for r in self.rrhs}) != len(self.rrhs):
            raise ValueError("duplicate RRH ids")

    @property
    def num_rrhs(self) -> int:
        return len(self.rrhs)

    @property
    def rrh_ids(self) -> list[int]:
        return [r.id for r in self.rrhs]

    @property
    def max_powers(self) -> np.ndarray:
        return np.array([r.max_power for r in self.rrhs])

    def rrh_index(self, rrh_id: int) -> int:
        for j, r in enumerate(self.rrhs):
            if r.id == rrh_id:
                return j
        raise KeyError(f"no RRH with id {rrh_id}")

    def with_rrhs(self, ids: Sequence[int]) -> "Network":
        """Copy of the network restricted to the given RRH ids (order preserved)."""
        keep = set(ids)
        missing = keep - set(self.rrh_ids)
        if missing:
            raise KeyError(f"unknown RRH ids {sorted(missing)}")
        return replace(self, rrhs=tuple(r for r in self.rrhs if r.id in keep))

    def replace(self, **changes) -> "Network":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SlotAssignment:
    """Decisions for one slot.

    ``alloc[r, s]`` schedules request ``r`` on subcarrier ``s``, ``active[j]``
    switches RRH ``j`` on and ``power[r, j, s]`` is the transmit power in W.
    """

    alloc: np.ndarray
    active: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alloc", _frozen(self.alloc, bool))
        object.__setattr__(self, "active", _frozen(self.active, bool))
        object.__setattr__(self, "power", _frozen(self.power))
        R, S = self.alloc.shape
        if self.power.shape != (R, self.active.shape[0], S):
            raise StructuralError(
                f"power shape {self.power.shape} does not match alloc {self.alloc.shape} "
                f"and {self.active.shape[0]} RRHs"
            )

    @classmethod
    def idle(cls, num_requests: int, num_rrhs: int, num_subcarriers: int) -> "SlotAssignment":
        return cls(
            np.zeros((num_requests, num_subcarriers), bool),
            np.zeros(num_rrhs, bool),
            np.zeros((num_requests, num_rrhs, num_subcarriers)),
        )

    def scheduled(self) -> dict[int, int]:
        """Map request index -> subcarrier for every scheduled request."""
        rows, cols = np.nonzero(self.alloc)
        return {int(r): int(s) for r, s in zip(rows, cols)}


@dataclass(frozen=True, eq=False)
class Schedule:
    slots: tuple[SlotAssignment, ...]
    satisfied: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        object.__setattr__(self, "satisfied", frozenset(self.satisfied))

    @classmethod
    def empty(cls, num_requests: int, network: Network) -> "Schedule":
        idle = SlotAssignment.idle(num_requests, network.num_rrhs, network.num_subcarriers)
        return cls((idle,) * network.horizon)

    @property
    def horizon(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class Violation:
    kind: str
    slot: int | None = None
    request_id: int | None = None
    rrh_id: int | None = None
    magnitude: float = 0.0


def _index_of(requests: Sequence[Request], request_id: int) -> int:
    for i, r in enumerate(requests):
        if r.id == request_id:
            return i
    raise KeyError(f"no request with id {request_id}")


def sinr_matrix(slot: SlotAssignment, requests: Sequence[Request], noise: float) -> np.ndarray:
    """SINR of every request on every subcarrier, shape (R, S)."""
    if not requests:
        return np.zeros((0, slot.alloc.shape[1]))
    G = np.stack([r.gains for r in requests])  # (R, H, S)
    P = slot.power
    total = P.sum(axis=0)  # (H, S): all power emitted per RRH and subcarrier
    signal = np.einsum("rjs,rjs->rs", P, G)
    interference = np.einsum("rjs,rjs->rs", total[None] - P, G)
    return signal / (noise + interference)


def compute_sinr(
    slot: SlotAssignment, request_id: int, subcarrier: int, requests: Sequence[Request], noise: float
) -> float:
    """SINR of one request on one subcarrier; interferers weighted by the victim's gains."""
    r = _index_of(requests, request_id)
    g = requests[r].gains[:, subcarrier]
    p = slot.power[:, :, subcarrier]
    signal = float(p[r] @ g)
    interference = float(np.delete(p, r, axis=0).sum(axis=0) @ g)
    return signal / (noise + interference)


def _check_dimensions(schedule: Schedule, requests: Sequence[Request], network: Network):
    if schedule.horizon != network.horizon:
        raise StructuralError(f"schedule has {schedule.horizon} slots, horizon is {network.horizon}")
    shape = (network.num_rrhs, network.num_subcarriers)
    for r in requests:
        if r.gains.shape != shape:
            raise StructuralError(f"request {r.id}: gains shape {r.gains.shape}, expected {shape}")
    for slot in schedule.slots:
        if slot.alloc.shape != (len(requests), network.num_subcarriers):
            raise StructuralError(f"alloc shape {slot.alloc.shape} does not match instance")
        if slot.active.shape != (network.num_rrhs,):
            raise StructuralError(f"active shape {slot.active.shape} does not match instance")


def validate_slot(
    slot: SlotAssignment,
    t: int,
    requests: Sequence[Request],
    network: Network,
    *,
    power_tol: float = 1e-9,
    sinr_rtol: float = 1e-6,
) -> list[Violation]:
    """Per-slot constraints: power caps, single subcarrier, SINR, BBU capacity, windows."""
    out: list[Violation] = []
    ids = network.rrh_ids
    per_rrh = slot.power.sum(axis=(0, 2))
    for j, rrh in enumerate(network.rrhs):
        cap = rrh.max_power if slot.active[j] else 0.0
        if per_rrh[j] > cap + power_tol:
            out.append(Violation("power_cap", t, None, ids[j], float(per_rrh[j] - cap)))

    sinr = sinr_matrix(slot, requests, network.noise_power)
    used = 0.0
    for i, req in enumerate(requests):
        chans = np.flatnonzero(slot.alloc[i])
        if len(chans) > 1:
            out.append(Violation("multiple_subcarriers", t, req.id, None, float(len(chans))))
        stray = slot.power[i].copy()
        stray[:, chans] = 0.0
        if stray.sum() > power_tol:
            out.append(Violation("power_unallocated", t, req.id, None, float(stray.sum())))
        if len(chans) == 0:
            continue
        used += req.resources
        if not req.in_window(t):
            out.append(Violation("window", t, req.id, None, float(len(chans))))
        for s in chans:
            if sinr[i, s] < req.min_sinr * (1.0 - sinr_rtol):
                out.append(Violation("sinr", t, req.id, None, float(req.min_sinr - sinr[i, s])))
    if used > network.bbu_capacity * (1.0 + 1e-12):
        out.append(Violation("bbu_capacity", t, None, None, float(used - network.bbu_capacity)))
    return out


def validate_schedule(
    schedule: Schedule,
    requests: Sequence[Request],
    network: Network,
    *,
    require_all: bool = True,
    power_tol: float = 1e-9,
    sinr_rtol: float = 1e-6,
) -> list[Violation]:
    """Check a full-horizon schedule against the feasibility constraints.

    Returns an empty list when the schedule is feasible. With
    ``require_all=False`` unscheduled requests are tolerated (online runs
    that drop requests); double scheduling is always reported.

    Raises:
        StructuralError: if array shapes do not match the instance.
    """
    _check_dimensions(schedule, requests, network)
    out: list[Violation] = []
    counts = np.zeros(len(requests), dtype=int)
    for t, slot in enumerate(schedule.slots, start=1):
        out.extend(validate_slot(slot, t, requests, network, power_tol=power_tol, sinr_rtol=sinr_rtol))
        counts += slot.alloc.sum(axis=1)
    for i, req in enumerate(requests):
        if counts[i] > 1 or (require_all and counts[i] == 0):
            out.append(Violation("scheduled_count", None, req.id, None, float(counts[i])))
    return out


def satisfied_ids(schedule: Schedule, requests: Sequence[Request]) -> frozenset:
    """Ids of requests scheduled exactly once and inside their window."""
    done = set()
    for i, req in enumerate(requests):
        hits = [t for t, slot in enumerate(schedule.slots, start=1) for _ in np.flatnonzero(slot.alloc[i])]
        if len(hits) == 1 and req.in_window(hits[0]):
            done.add(req.id)
    return frozenset(done)
