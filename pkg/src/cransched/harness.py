"""Monte Carlo driver: runs algorithms on seeded instances and aggregates the metrics."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .baseline import run_heuristic
from .cost import CostBreakdown, schedule_breakdown
from .dp_offline import MAX_REQUESTS, MAX_RRHS, solve_offline
from .greedy_online import run_online
from .model import Network, Request, Schedule
from .scenario import ScenarioConfig, make_instance

log = logging.getLogger(__name__)

ALGORITHMS = ("optimal", "greedy-p1", "greedy-p2", "heuristic")


@dataclass(eq=False)
class RunMetrics:
    weighted_cost: float
    satisfied_ratio: float
    rrh_activation: np.ndarray  # fraction of slots each RRH is on
    breakdown: CostBreakdown
    feasible: bool = True
    schedule: Schedule | None = field(default=None, repr=False)


def schedule_for(algorithm: str, requests: Sequence[Request], network: Network) -> Schedule | None:
    """Run one algorithm; ``None`` means the exact solver found no feasible schedule."""
    if algorithm == "optimal":
        sol = solve_offline(requests, network)
        return None if sol is None else sol.schedule
    if algorithm == "greedy-p1":
        return run_online(requests, network, policy=1)
    if algorithm == "greedy-p2":
        return run_online(requests, network, policy=2)
    if algorithm == "heuristic":
        return run_heuristic(requests, network)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def metrics_for(schedule: Schedule, requests: Sequence[Request], network: Network) -> RunMetrics:
    bd = schedule_breakdown(schedule, requests, network)
    ratio = len(schedule.satisfied) / len(requests) if requests else 1.0
    act = np.mean([slot.active for slot in schedule.slots], axis=0)
    return RunMetrics(bd.weighted_total, ratio, act, bd, True, schedule)


def run_once(requests: Sequence[Request], algorithm: str, network: Network) -> RunMetrics:
    schedule = schedule_for(algorithm, requests, network)
    if schedule is None:
        nan = float("nan")
        return RunMetrics(nan, nan, np.full(network.num_rrhs, nan), CostBreakdown(nan, nan, nan, nan), False)
    return metrics_for(schedule, requests, network)


@dataclass(frozen=True)
class SweepSpec:
    algorithms: tuple[str, ...] = ("greedy-p1", "greedy-p2")
    gamma_db_values: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0)
    epsilon_values: tuple[float, ...] = (0.0,)
    r_max_values: tuple[int, ...] = (7,)
    runs: int = 500
    base_seed: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; expected one of {ALGORITHMS}")


@dataclass
class SweepResult:
    rrh_ids: list[int]
    rows: list[dict] = field(default_factory=list)
    skipped: list[tuple[dict, str]] = field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        return (
            ["algo", "gamma_db", "epsilon", "r_max", "runs", "mean_cost_w", "stderr_cost_w"]
            + ["satisfied_ratio", "stderr_ratio"]
            + [f"act_rrh{i}" for i in self.rrh_ids]
            + ["tx_w", "activation_w", "bbu_w"]
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        write_csv(self, buf)
        return buf.getvalue()


def _mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    if n == 0:
        return math.nan, math.nan
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def aggregate(metrics: Sequence[RunMetrics], num_rrhs: int) -> dict:
    """Means and standard errors over the feasible runs of one sweep cell."""
    ok = [m for m in metrics if m.feasible]
    cost, cost_se = _mean_stderr([m.weighted_cost for m in ok])
    ratio, ratio_se = _mean_stderr([m.satisfied_ratio for m in ok])
    if ok:
        act = [math.fsum(m.rrh_activation[j] for m in ok) / len(ok) for j in range(num_rrhs)]
    else:
        act = [math.nan] * num_rrhs
    return dict(
        runs=len(ok),
        mean_cost_w=cost,
        stderr_cost_w=cost_se,
        satisfied_ratio=ratio,
        stderr_ratio=ratio_se,
        activation=act,
        tx_w=_mean_stderr([m.breakdown.tx for m in ok])[0],
        activation_w=_mean_stderr([m.breakdown.rrh_activation for m in ok])[0],
        bbu_w=_mean_stderr([m.breakdown.bbu for m in ok])[0],
    )


def _cell_runs(args):
    algorithm, scenario, network, seeds = args
    out = []
    for seed in seeds:
        requests = make_instance(scenario, network, seed)
        m = run_once(requests, algorithm, network)
        m.schedule = None
        out.append(m)
    return out


def run_cell(
    algorithm: str, scenario: ScenarioConfig, network: Network, seeds: Sequence[int], workers: int = 1
) -> list[RunMetrics]:
    """Metrics for one algorithm over the given seeds, in seed order."""
    seeds = list(seeds)
    if workers <= 1 or len(seeds) < 2:
        return _cell_runs((algorithm, scenario, network, seeds))
    chunks = [seeds[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_cell_runs, [(algorithm, scenario, network, c) for c in chunks]))
    by_seed = {}
    for chunk, res in zip(chunks, parts):
        by_seed.update(zip(chunk, res))
    return [by_seed[s] for s in seeds]


def run_sweep(spec: SweepSpec, scenario: ScenarioConfig, network: Network, *, workers: int = 1) -> SweepResult:
    """Evaluate every (algorithm, gamma, epsilon, R_max) cell on paired seeds.

    Run ``i`` of every cell uses seed ``base_seed + i``, so all algorithms
    (and all SINR levels) see the same users, channels and arrival pattern.
    Rows come out sorted by (algo, gamma_db, epsilon, r_max).
    """
    result = SweepResult(network.rrh_ids)
    seeds = range(spec.base_seed, spec.base_seed + spec.runs)
    cells = sorted(
        (a, float(g), float(e), int(r))
        for a in spec.algorithms
        for g in spec.gamma_db_values
        for e in spec.epsilon_values
        for r in spec.r_max_values
    )
    for algo, gamma, eps, r_max in cells:
        params = dict(algo=algo, gamma_db=gamma, epsilon=eps, r_max=r_max)
        if algo == "optimal" and (r_max > MAX_REQUESTS or network.num_rrhs > MAX_RRHS):
            reason = f"exact solver limited to {MAX_REQUESTS} requests and {MAX_RRHS} RRHs"
            log.warning("skipping %s: %s", params, reason)
            result.skipped.append((params, reason))
            continue
        sc = replace(scenario, min_sinr_db=gamma, max_users=r_max)
        net = network.replace(epsilon=eps)
        agg = aggregate(run_cell(algo, sc, net, seeds, workers), net.num_rrhs)
        result.rows.append({**params, **agg})
    return result


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.6g}"


def write_csv(result: SweepResult, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow(
            [_fmt(row[k]) for k in ("algo", "gamma_db", "epsilon", "r_max", "runs", "mean_cost_w", "stderr_cost_w")]
            + [_fmt(row["satisfied_ratio"]), _fmt(row["stderr_ratio"])]
            + [_fmt(a) for a in row["activation"]]
            + [_fmt(row[k]) for k in ("tx_w", "activation_w", "bbu_w")]
        )
