"""
Greedy online scheduling at network scale
=========================================

Five RRHs, eight subcarriers, ten slots and up to thirty users. Policy 1
sheds load when the power LP fails, Policy 2 first switches on spare RRHs.
"""

import time

import numpy as np

from cransched import ScenarioConfig, default_network, make_instance, run_online
from cransched.model import satisfied_ids

net = default_network(num_subcarriers=8, horizon=10)
for gamma_db in (0.0, 10.0, 20.0):
    reqs = make_instance(ScenarioConfig(max_users=30, min_sinr_db=gamma_db), net, seed=7)
    for policy in (1, 2):
        t0 = time.perf_counter()
        sched = run_online(reqs, net, policy)
        ms = 1e3 * (time.perf_counter() - t0)
        on = np.mean([s.active for s in sched.slots], axis=0)
        served = len(satisfied_ids(sched, reqs))
        print(f"{gamma_db:4.0f} dB  P{policy}: served {served}/{len(reqs)}  activation {np.round(on, 2)}  {ms:.1f} ms")
