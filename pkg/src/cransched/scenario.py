"""Random instance generation: disk-uniform users, path loss with Rayleigh fading, binomial arrivals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import Network, Request, Rrh, db_to_linear, dbm_to_watt, resources_for_request

# Fiber costs of RRH_1..RRH_5; RRH_3 sits at the centre next to the BBU pool.
DEFAULT_FIBER_POWER = (2.0, 1.0, 1.0, 2.0, 1.0)
DEFAULT_BBU_CAPACITY = 60.0

DEADLINE_POLICIES = ("end-of-horizon", "fixed", "uniform")
ARRIVAL_MODES = ("per-run", "per-slot")


def default_rrh_layout(radius: float = 500.0) -> list[tuple[float, float]]:
    """Centre RRH (id 3) plus four RRHs at 0.6 * radius on the diagonals."""
    d = 0.6 * radius / math.sqrt(2.0)
    return [(-d, d), (d, d), (0.0, 0.0), (d, -d), (-d, -d)]


@dataclass(frozen=True)
class ScenarioConfig:
    radius: float = 500.0
    max_users: int = 7
    arrival_prob: float = 0.5
    min_sinr_db: float = 0.0
    deadline_policy: str = "end-of-horizon"
    deadline_window: tuple[int, int] = (0, 0)  # fixed: (d, d); uniform: (lo, hi)
    rrh_layout: tuple[tuple[float, float], ...] = field(default_factory=lambda: tuple(default_rrh_layout()))
    pathloss_intercept_db: float = 128.1
    pathloss_slope_db: float = 37.6  # dB per decade of distance in km
    arrival_mode: str = "per-run"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.arrival_prob <= 1.0:
            raise ValueError("arrival_prob must lie in [0, 1]")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.max_users < 0:
            raise ValueError("max_users must be non-negative")
        if self.deadline_policy not in DEADLINE_POLICIES:
            raise ValueError(f"deadline_policy must be one of {DEADLINE_POLICIES}")
        if self.arrival_mode not in ARRIVAL_MODES:
            raise ValueError(f"arrival_mode must be one of {ARRIVAL_MODES}")
        object.__setattr__(self, "rrh_layout", tuple(tuple(map(float, p)) for p in self.rrh_layout))
        object.__setattr__(self, "deadline_window", tuple(int(v) for v in self.deadline_window))

    @property
    def pathloss_exponent(self) -> float:
        return self.pathloss_slope_db / 10.0


def default_network(
    *,
    num_subcarriers: int = 2,
    horizon: int = 3,
    radius: float = 500.0,
    max_power_dbm: float = 48.0,
    activation_power: float = 130.0,
    sleep_power: float = 75.0,
    fiber_power: Sequence[float] = DEFAULT_FIBER_POWER,
    layout: Sequence[tuple[float, float]] | None = None,
    **overrides,
) -> Network:
    """Five-RRH network with the reference power constants; keyword overrides go to :class:`Network`."""
    layout = list(layout) if layout is not None else default_rrh_layout(radius)
    if len(layout) != len(fiber_power):
        raise ValueError("layout and fiber_power must list the same number of RRHs")
    rrhs = tuple(
        Rrh(j + 1, dbm_to_watt(max_power_dbm), activation_power, sleep_power, float(f), tuple(pos))
        for j, (f, pos) in enumerate(zip(fiber_power, layout))
    )
    kw = dict(bbu_capacity=DEFAULT_BBU_CAPACITY)
    kw.update(overrides)
    return Network(rrhs=rrhs, num_subcarriers=num_subcarriers, horizon=horizon, **kw)


def place_users(count: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Area-uniform positions in a disk centred at the origin, shape (count, 2)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    r = radius * np.sqrt(rng.random(count))
    phi = rng.uniform(0.0, 2.0 * np.pi, count)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def path_gain(distance_m, intercept_db: float = 128.1, slope_db: float = 37.6) -> np.ndarray:
    """Linear path gain ``10^(-PL/10)`` with ``PL = A + B log10(d / 1 km)``; distances clamp at 1 m."""
    d = np.maximum(np.asarray(distance_m, float), 1.0)
    pl_db = intercept_db + slope_db * np.log10(d / 1000.0)
    return 10.0 ** (-pl_db / 10.0)


def gen_channel_gains(
    user_pos,
    rrh_positions,
    num_subcarriers: int,
    rng: np.random.Generator,
    *,
    intercept_db: float = 128.1,
    slope_db: float = 37.6,
) -> np.ndarray:
    """Gains of shape (users, RRHs, subcarriers): path gain times unit-mean exponential fading."""
    user_pos = np.asarray(user_pos, float).reshape(-1, 2)
    rrh_positions = np.asarray(rrh_positions, float).reshape(-1, 2)
    d = np.linalg.norm(user_pos[:, None, :] - rrh_positions[None, :, :], axis=2)
    pl = path_gain(d, intercept_db, slope_db)
    fading = rng.exponential(1.0, size=(len(user_pos), len(rrh_positions), num_subcarriers))
    return pl[:, :, None] * fading


def _deltas(config: ScenarioConfig, horizon: int, t0: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    lo, hi = config.deadline_window
    width = rng.integers(min(lo, hi), max(lo, hi) + 1, size=t0.shape)
    if config.deadline_policy == "end-of-horizon":
        return horizon - t0
    if config.deadline_policy == "fixed":
        return np.minimum(lo, horizon - t0)
    return np.minimum(width, horizon - t0)


def gen_requests(config: ScenarioConfig, network: Network, rng: np.random.Generator) -> list[Request]:
    """Draw one instance.

    ``per-run``: each of ``max_users`` potential users submits once with
    probability ``arrival_prob``, arriving in a uniformly drawn slot.
    ``per-slot``: the same Bernoulli trial is repeated in every slot with
    fresh users, so ``max_users`` bounds the arrivals per slot.

    The number of random variates consumed does not depend on the SINR target
    or the arrival probability, so a fixed seed yields the same users,
    channels and windows across a sweep (common random numbers).
    """
    n = config.max_users
    T = network.horizon
    batches = T if config.arrival_mode == "per-slot" else 1
    positions = place_users(n * batches, config.radius, rng)
    gains = gen_channel_gains(
        positions,
        [r.position for r in network.rrhs],
        network.num_subcarriers,
        rng,
        intercept_db=config.pathloss_intercept_db,
        slope_db=config.pathloss_slope_db,
    )
    submits = rng.random(n * batches) < config.arrival_prob
    if batches == 1:
        t0 = rng.integers(1, T + 1, size=n)
    else:
        t0 = np.repeat(np.arange(1, T + 1), n)
    delta = _deltas(config, T, t0, rng)
    gamma = db_to_linear(config.min_sinr_db)
    m = resources_for_request(gamma, network.vm_base, network.theta)
    out = []
    for u in np.flatnonzero(submits):
        out.append(Request(len(out), int(u), int(t0[u]), int(delta[u]), gamma, m, gains[u]))
    return out


def make_instance(config: ScenarioConfig, network: Network, seed: int | None = None) -> list[Request]:
    rng = np.random.default_rng(config.seed if seed is None else seed)
    return gen_requests(config, network, rng)
