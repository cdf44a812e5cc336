"""
Minimum-power control for a fixed allocation
=============================================

Two requests share one subcarrier of a two-RRH network. The LP finds the
cheapest transmit powers that meet both SINR targets, and the result is
compared against the interference-free single-link power.
"""

import numpy as np

from cransched import Request, compute_sinr, default_network, solve_allocation
from cransched.model import SlotAssignment

net = default_network(num_subcarriers=1, horizon=1).with_rrhs([1, 5])
gamma = 10 ** (5 / 10)

# gains[j, s]: each user hears its own RRH well and the other one weakly
reqs = [
    Request(0, 0, 1, 0, gamma, 6.0, np.array([[4e-11], [2e-13]])),
    Request(1, 1, 1, 0, gamma, 6.0, np.array([[3e-13], [6e-11]])),
]

alloc = np.ones((2, 1), bool)
both_on = np.ones(2, bool)
sol = solve_allocation(alloc, both_on, reqs, net)
print("status:", sol.status)
print("power per (request, rrh) in W:\n", sol.power[:, :, 0])

slot = SlotAssignment(alloc, both_on, sol.power)
sinr = [compute_sinr(slot, r.id, 0, reqs, net.noise_power) for r in reqs]
print("SINR in dB:", np.round(10 * np.log10(sinr), 4), "target", 5.0)

# without the neighbour each user needs only gamma * noise / best gain
alone = [gamma * net.noise_power / r.gains.max() for r in reqs]
print("interference-free powers:", alone)
print("price of sharing the subcarrier: %.3g W" % (sol.objective - sum(alone)))
