"""Job-shop / flexible job-shop toolkit: parsing, verification, bounds and a branch-and-bound solver."""

from .bounds import lb_best, lb_job_chain, lb_machine_load
from .instance import Instance, OperationSpec, horizon, load_instance, parse_fjssp, parse_jssp, serialize
from .schedule import Assignment, MachineOrderSolution, Schedule, machine_end_times, parse_orders, semi_active, verify
from .solver import SolveConfig, SolveReport, Status, sat_probe_ladder, solve

__version__ = "0.1.0"
