"""
Exact offline scheduling
========================

A seven-user instance on the two-RRH, two-subcarrier, three-slot network.
The dynamic program returns the cheapest schedule that serves everyone in
time; brute force over all placements confirms the optimum.
"""

from cransched import ScenarioConfig, brute_force, default_network, make_instance, solve_offline
from cransched import schedule_breakdown, validate_schedule

net = default_network(num_subcarriers=2, horizon=3).with_rrhs([1, 5])
reqs = make_instance(ScenarioConfig(max_users=7, min_sinr_db=10.0), net, seed=2)
print(len(reqs), "requests;", [(r.arrival_slot, r.arrival_slot + r.window_len) for r in reqs])

best = solve_offline(reqs, net)
print("optimal cost: %.6f  (states %d, LP solves %d)" % (best.cost, best.explored_states, best.lp_solves))
for t, slot in enumerate(best.schedule.slots, start=1):
    print(" slot", t, "rrhs on", slot.active.astype(int), "serves", sorted(slot.scheduled()))

print("breakdown:", schedule_breakdown(best.schedule, reqs, net))
print("violations:", validate_schedule(best.schedule, reqs, net))

check = brute_force(reqs, net)
print("brute force agrees:", abs(check.cost - best.cost) <= 1e-9 * best.cost)
