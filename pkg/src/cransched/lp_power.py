"""Single-slot power control: minimum total transmit power for a fixed (a(t), y(t)).

With the subcarrier allocation and the active RRH set frozen, the SINR
constraints become linear in the powers and the problem is an LP. Powers are
solved in units of each link's isolated requirement ``xi = gamma * noise / g``
so that every SINR row reads ``sum_j x_rj - interference >= 1``; this keeps the
tableau well scaled even though gains span ten orders of magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Network, Request, StructuralError
from .simplex import INFEASIBLE, OPTIMAL, SolverError, solve_lp

__all__ = [
    "PowerProblem",
    "PowerSolution",
    "SolverError",
    "build_problem",
    "solve",
    "solve_allocation",
    "OPTIMAL",
    "INFEASIBLE",
]


@dataclass(frozen=True, eq=False)
class PowerProblem:
    """The LP for one slot.

    ``gains[k, j]`` is the gain of the k-th scheduled request towards the j-th
    active RRH on the request's own subcarrier. Interference between two
    scheduled requests exists only when they share a subcarrier.
    """

    scheduled: tuple[tuple[int, int], ...]  # (request index, subcarrier)
    active_rrhs: tuple[int, ...]  # RRH indices into Network.rrhs
    gains: np.ndarray  # (K, A)
    caps: np.ndarray  # (A,)
    sinr_targets: np.ndarray  # (K,)
    noise: float
    shape: tuple[int, int, int]  # (R, H, S) of the full power tensor

    @property
    def num_variables(self) -> int:
        return len(self.scheduled) * len(self.active_rrhs)

    @property
    def num_constraints(self) -> int:
        if not self.scheduled:
            return 0
        return len(self.scheduled) + len(self.active_rrhs)


@dataclass(frozen=True, eq=False)
class PowerSolution:
    power: np.ndarray  # (R, H, S)
    objective: float
    status: str

    @property
    def feasible(self) -> bool:
        return self.status == OPTIMAL


def build_problem(alloc, active, requests: Sequence[Request], network: Network) -> PowerProblem:
    alloc = np.asarray(alloc, bool)
    active = np.asarray(active, bool)
    R, H, S = len(requests), network.num_rrhs, network.num_subcarriers
    if alloc.shape != (R, S) or active.shape != (H,):
        raise StructuralError(f"alloc {alloc.shape} / active {active.shape} do not match ({R}, {S}) / ({H},)")
    if np.any(alloc.sum(axis=1) > 1):
        raise StructuralError("a request is allocated to more than one subcarrier")
    rows, cols = np.nonzero(alloc)
    scheduled = tuple((int(r), int(s)) for r, s in zip(rows, cols))
    act = tuple(int(j) for j in np.flatnonzero(active))
    if scheduled:
        gains = np.array([[requests[r].gains[j, s] for j in act] for r, s in scheduled]).reshape(len(scheduled), len(act))
    else:
        gains = np.zeros((0, len(act)))
    return PowerProblem(
        scheduled=scheduled,
        active_rrhs=act,
        gains=gains,
        caps=np.array([network.rrhs[j].max_power for j in act]),
        sinr_targets=np.array([requests[r].min_sinr for r, _ in scheduled]),
        noise=network.noise_power,
        shape=(R, H, S),
    )


def _infeasible(shape) -> PowerSolution:
    return PowerSolution(np.zeros(shape), float("nan"), INFEASIBLE)


def _to_solution(problem: PowerProblem, p: np.ndarray) -> PowerSolution:
    power = np.zeros(problem.shape)
    for k, (r, s) in enumerate(problem.scheduled):
        for a, j in enumerate(problem.active_rrhs):
            power[r, j, s] = p[k, a]
    return PowerSolution(power, float(p.sum()), OPTIMAL)


def solve(problem: PowerProblem, *, tol: float = 1e-9) -> PowerSolution:
    """Minimise total transmit power; status is ``optimal`` or ``infeasible``.

    Raises:
        SolverError: on pivot-limit exhaustion or numerical breakdown.
    """
    K, A = problem.gains.shape
    if K == 0:
        return PowerSolution(np.zeros(problem.shape), 0.0, OPTIMAL)
    g = problem.gains
    gamma = problem.sinr_targets
    need = gamma > 0
    if np.any(need & ~np.any(g > 0, axis=1)):
        return _infeasible(problem.shape)

    with np.errstate(divide="ignore"):
        xi = np.where(g > 0, (gamma * problem.noise)[:, None] / g, np.inf)
    subc = np.array([s for _, s in problem.scheduled])

    # interference-free case: serve each request from its best RRH
    shared = np.bincount(subc[need]).max(initial=0) > 1 if need.any() else False
    if not shared:
        p = np.zeros((K, A))
        for k in np.flatnonzero(need):
            j = int(np.argmin(xi[k]))
            p[k, j] = xi[k, j]
        if np.all(p.sum(axis=0) <= problem.caps * (1 + 1e-12)):
            return _to_solution(problem, p)
        # caps bind: fall through to the LP

    var = [(k, a) for k in np.flatnonzero(need) for a in range(A) if g[k, a] > 0]
    col = {v: i for i, v in enumerate(var)}
    n = len(var)
    xis = np.array([xi[k, a] for k, a in var])

    sched_rows = list(np.flatnonzero(need))
    A_ge = np.zeros((len(sched_rows), n))
    for row, k in enumerate(sched_rows):
        for (k2, a), i in col.items():
            if k2 == k:
                A_ge[row, i] = 1.0
            elif subc[k2] == subc[k]:
                A_ge[row, i] = -gamma[k2] * g[k, a] / g[k2, a]
    A_ub = np.zeros((A, n))
    for (k, a), i in col.items():
        A_ub[a, i] = xis[i] / problem.caps[a]

    res = solve_lp(xis / xis.min(), A_ub, np.ones(A), A_ge, np.ones(len(sched_rows)), tol=tol)
    if res.status == INFEASIBLE:
        return _infeasible(problem.shape)
    p = np.zeros((K, A))
    for (k, a), i in col.items():
        p[k, a] = res.x[i] * xis[i]
    return _to_solution(problem, p)


def solve_allocation(alloc, active, requests: Sequence[Request], network: Network) -> PowerSolution:
    return solve(build_problem(alloc, active, requests, network))
