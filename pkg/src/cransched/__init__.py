"""Power-efficient request scheduling in cloud radio access networks.

Exact offline scheduling by dynamic programming, a greedy online scheduler,
an all-RRHs-on baseline, and the LP power control they share.
"""

from .baseline import run_heuristic
from .cost import CostBreakdown, horizon_cost, schedule_breakdown
from .dp_offline import brute_force, feasibility_test, solve_offline
from .greedy_online import run_online
from .harness import ALGORITHMS, SweepSpec, run_once, run_sweep
from .lp_power import build_problem, solve, solve_allocation
from .model import (
    Network,
    Request,
    Rrh,
    Schedule,
    SlotAssignment,
    StructuralError,
    Violation,
    compute_sinr,
    validate_schedule,
)
from .scenario import ScenarioConfig, default_network, make_instance

__version__ = "0.1.0"
