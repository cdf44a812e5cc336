"""
Parameter sweep to CSV
======================

A small sweep over SINR level and the number of potential users. The same call
backs the ``cransched sweep`` command, and reruns give identical bytes.
"""

import io
import sys

from cransched import ScenarioConfig, SweepSpec, default_network, run_sweep
from cransched.harness import write_csv

net = default_network(num_subcarriers=8, horizon=10)
spec = SweepSpec(
    algorithms=("greedy-p1", "greedy-p2"),
    gamma_db_values=(0.0, 20.0),
    r_max_values=(15, 30),
    runs=20,
)
result = run_sweep(spec, ScenarioConfig(), net)
write_csv(result, sys.stdout)

again = io.StringIO()
write_csv(run_sweep(spec, ScenarioConfig(), net), again)
first = io.StringIO()
write_csv(result, first)
print("identical rerun:", first.getvalue() == again.getvalue())
