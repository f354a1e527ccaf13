from .search import (
    BoundsCell,
    InvalidConfig,
    LadderResult,
    Mode,
    SolveConfig,
    SolveReport,
    Status,
    luby,
    sat_probe_ladder,
    solve,
)
from .state import Problem, Propagation, SearchState, propagate

__all__ = [
    "BoundsCell", "InvalidConfig", "LadderResult", "Mode", "Problem", "Propagation", "SearchState",
    "SolveConfig", "SolveReport", "Status", "luby", "propagate", "sat_probe_ladder", "solve",
]
