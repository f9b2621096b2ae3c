"""Parity game solving by strategy improvement, global and local."""

from .errors import ParseError, PolicyContractError, SolverInvariantError
from .formats import parse_pgsolver, parse_solution, write_dot, write_pgsolver, write_solution
from .game import (
    CountingSource,
    ExplicitGameSource,
    GameSource,
    ParityGame,
    attractor,
    make_turn_based,
    verify_winning_strategy,
)
from .generators import (
    ClusterParams,
    gen_chained_clusters_for_locality,
    gen_clustered,
    gen_cycle_pair,
    gen_sink,
    gen_two_cycle_choice,
)
from .global_si import GlobalSolution, all_max_policy, single_switch_policy, solve_global
from .local_si import (
    LocalSolution,
    bfs_expansion_policy,
    local_all_max_policy,
    local_single_switch_policy,
    random_expansion_policy,
    solve_local,
)
from .oracle import solve_exhaustive, solve_recursive
from .trace import TraceEvent, parse_event, replay_events, trace_solve
from .valuation import INFINITY, evaluate_strategy, val_less

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "ClusterParams",
    "CountingSource",
    "ExplicitGameSource",
    "GameSource",
    "GlobalSolution",
    "LocalSolution",
    "ParityGame",
    "ParseError",
    "PolicyContractError",
    "SolverInvariantError",
    "TraceEvent",
    "all_max_policy",
    "attractor",
    "bfs_expansion_policy",
    "evaluate_strategy",
    "gen_chained_clusters_for_locality",
    "gen_clustered",
    "gen_cycle_pair",
    "gen_sink",
    "gen_two_cycle_choice",
    "local_all_max_policy",
    "local_single_switch_policy",
    "make_turn_based",
    "parse_event",
    "parse_pgsolver",
    "parse_solution",
    "random_expansion_policy",
    "replay_events",
    "single_switch_policy",
    "solve_exhaustive",
    "solve_global",
    "solve_local",
    "solve_recursive",
    "trace_solve",
    "val_less",
    "verify_winning_strategy",
    "write_dot",
    "write_pgsolver",
    "write_solution",
]
