"""
Optimal vs greedy vs all-on heuristic
=====================================

Mean weighted power over paired random instances. Every algorithm sees the
same users and channels at every SINR level.
"""

import numpy as np

from cransched import ALGORITHMS, ScenarioConfig, default_network, make_instance, run_once

net = default_network(num_subcarriers=2, horizon=3).with_rrhs([1, 5])
seeds = range(40)

print("gamma  " + "  ".join(f"{a:>10s}" for a in ALGORITHMS))
for gamma_db in (0.0, 10.0, 20.0):
    cfg = ScenarioConfig(max_users=7, min_sinr_db=gamma_db)
    costs = {a: [] for a in ALGORITHMS}
    for seed in seeds:
        reqs = make_instance(cfg, net, seed)
        runs = {a: run_once(reqs, a, net) for a in ALGORITHMS}
        if runs["optimal"].feasible:
            for a, m in runs.items():
                costs[a].append(m.weighted_cost)
    print(f"{gamma_db:5.0f}  " + "  ".join(f"{np.mean(costs[a]):10.3f}" for a in ALGORITHMS))
