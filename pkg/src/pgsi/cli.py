"""Command line front end: solve, gen, verify, convert, bench.

Exit codes: 0 success, 1 failed verification, 2 bad input, 3 violated
solver invariant or policy contract.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from dataclasses import dataclass

from .errors import ParseError, PolicyContractError, SolverInvariantError
from .formats import (
    ParsedGame,
    parse_pgsolver,
    parse_solution,
    write_dot,
    write_pgsolver,
    write_solution,
)
from .game import verify_winning_strategy
from .generators import (
    ClusterParams,
    gen_chained_clusters_for_locality,
    gen_clustered,
    gen_cycle_pair,
    gen_sink,
    gen_two_cycle_choice,
)
from .global_si import all_max_policy, single_switch_policy, solve_global
from .local_si import (
    bfs_expansion_policy,
    local_all_max_policy,
    local_single_switch_policy,
    random_expansion_policy,
    solve_local,
)


def _read_game(path: str) -> ParsedGame:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse_pgsolver(text)


def _int_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated ints, got {text!r}")
    return int(parts[0]), int(parts[1])


def _policy_spec(text: str, local: bool):
    if text == "all-max":
        return local_all_max_policy() if local else all_max_policy()
    if text.startswith("single:"):
        seed = int(text.split(":", 1)[1])
        return local_single_switch_policy(seed) if local else single_switch_policy(seed)
    raise ValueError(f"unknown policy {text!r}; use all-max or single:<seed>")


def _expansion_spec(text: str):
    if text.startswith("random:"):
        return random_expansion_policy(int(text.split(":", 1)[1]))
    if text.startswith("bfs:"):
        return bfs_expansion_policy(int(text.split(":", 1)[1]))
    raise ValueError(f"unknown expansion {text!r}; use random:<seed> or bfs:<k>")


def _cmd_solve(args) -> int:
    parsed = _read_game(args.game)
    game = parsed.game
    if game.n == 0:
        raise ValueError("the game has no nodes")
    dense_of = {ext: v for v, ext in enumerate(parsed.original_ids)}

    if args.mode == "global":
        solution = solve_global(game, args.player, _policy_spec(args.policy, local=False))
        stats_lines = [f"iterations: {solution.iterations}"]
    else:
        if args.start is None:
            start = parsed.start
        elif args.start in dense_of:
            start = dense_of[args.start]
        else:
            raise ValueError(f"start node {args.start} is not in the game")
        solution = solve_local(
            game,
            start,
            _policy_spec(args.policy, local=True),
            _expansion_spec(args.expansion),
            first_player=args.first_player,
            check=args.check_invariants,
        )
        stats_lines = [
            f"winner: {solution.winner}",
            f"visited: {solution.visited}",
            f"expanded: {solution.stats.expanded}",
            f"improvements: {solution.stats.improvements}",
            f"evaluation steps: {solution.stats.evaluation_steps}",
        ]
    sys.stdout.write(write_solution(solution, parsed.original_ids))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(write_dot(game, solution, parsed.original_ids))
    if args.stats:
        for line in stats_lines:
            print(line, file=sys.stderr)
    return 0


def _cmd_gen(args) -> int:
    if args.kind == "clustered":
        params = ClusterParams(
            total_nodes=args.nodes,
            seed=args.seed,
            inter_edges_per_cluster=args.inter,
            owner_bias=args.owner_bias,
        )
        if args.cluster_size:
            params.cluster_size_range = args.cluster_size
        if args.degree:
            params.intra_out_degree_range = args.degree
        if args.priorities:
            params.priority_range = args.priorities
        game = gen_clustered(params)
    else:
        name = args.fixture
        if name == "g1":
            game = gen_cycle_pair()
        elif name == "g2":
            game = gen_two_cycle_choice()
        elif name == "g3":
            game = gen_sink()
        elif name.startswith("locality:"):
            game, _start = gen_chained_clusters_for_locality(
                int(name.split(":", 1)[1]), args.seed
            )
        else:
            raise ValueError(f"unknown fixture {name!r}")
    sys.stdout.write(write_pgsolver(game))
    return 0


def _cmd_verify(args) -> int:
    parsed = _read_game(args.game)
    game = parsed.game
    dense_of = {ext: v for v, ext in enumerate(parsed.original_ids)}
    with open(args.solution, encoding="utf-8") as fh:
        records = parse_solution(fh.read())

    regions: tuple[set[int], set[int]] = (set(), set())
    strategies: tuple[dict[int, int], dict[int, int]] = ({}, {})
    for ext, (winner, target) in records.items():
        if ext not in dense_of:
            raise ValueError(f"solution mentions unknown node {ext}")
        v = dense_of[ext]
        regions[winner].add(v)
        if target is not None:
            if target not in dense_of:
                raise ValueError(f"solution mentions unknown node {target}")
            strategies[winner][v] = dense_of[target]

    for player in (0, 1):
        if not regions[player]:
            continue
        outcome = verify_winning_strategy(game, player, regions[player], strategies[player])
        if not outcome:
            print(f"player {player}: {outcome.reason}", file=sys.stderr)
            return 1
    print("ok", file=sys.stderr)
    return 0


def _cmd_convert(args) -> int:
    parsed = _read_game(args.game)
    if args.dot:
        sys.stdout.write(write_dot(parsed.game, None, parsed.original_ids))
    else:
        sys.stdout.write(write_pgsolver(parsed.game, parsed.original_ids))
    return 0


@dataclass
class BenchRow:
    """Aggregates over the runs of one game size; times are wall-clock."""

    size: int
    runs: int
    global_ms: float
    local_ms: float
    local_visited_mean: float
    global_ms_median: float
    local_ms_median: float
    local_visited_median: float


def _bench_size(size: int, runs: int, seed: int) -> BenchRow:
    global_times: list[float] = []
    local_times: list[float] = []
    visited: list[int] = []
    for index in range(runs):
        game = gen_clustered(ClusterParams(total_nodes=size, seed=seed + index))
        tick = time.perf_counter()
        solve_global(game, 0, all_max_policy())
        global_times.append((time.perf_counter() - tick) * 1000)
        tick = time.perf_counter()
        local = solve_local(
            game, 0, local_all_max_policy(), random_expansion_policy(seed + index)
        )
        local_times.append((time.perf_counter() - tick) * 1000)
        visited.append(local.visited)
    return BenchRow(
        size=size,
        runs=runs,
        global_ms=statistics.fmean(global_times),
        local_ms=statistics.fmean(local_times),
        local_visited_mean=statistics.fmean(visited),
        global_ms_median=statistics.median(global_times),
        local_ms_median=statistics.median(local_times),
        local_visited_median=statistics.median(visited),
    )


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    if not sizes or args.runs < 1:
        raise ValueError("need at least one size and one run")
    rows = [_bench_size(size, args.runs, args.seed) for size in sizes]
    lines = ["size,global_ms,local_visited_mean,local_ms"]
    for r in rows:
        lines.append(
            f"{r.size},{r.global_ms:.3f},{r.local_visited_mean:.2f},{r.local_ms:.3f}"
        )
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plotting import render_bench_plot

        render_bench_plot(rows, args.plot)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgsi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game globally or from one start node")
    p.add_argument("game", help="game file in PGSolver format, or - for stdin")
    p.add_argument("--mode", choices=("global", "local"), default="local")
    p.add_argument("--player", type=int, choices=(0, 1), default=0,
                   help="solved player (global mode)")
    p.add_argument("--start", type=int, default=None,
                   help="start node id (local mode; default: first record)")
    p.add_argument("--policy", default="all-max",
                   help="improvement policy: all-max or single:<seed>")
    p.add_argument("--expansion", default="random:0",
                   help="expansion policy: random:<seed> or bfs:<k>")
    p.add_argument("--first-player", type=int, choices=(0, 1), default=0)
    p.add_argument("--check-invariants", action="store_true",
                   help="sweep all state invariants after every step")
    p.add_argument("--stats", action="store_true", help="print counters to stderr")
    p.add_argument("--dot", metavar="PATH", help="also write a DOT rendering")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("gen", help="generate games")
    gen_sub = p.add_subparsers(dest="kind", required=True)
    c = gen_sub.add_parser("clustered", help="clustered random game")
    c.add_argument("--nodes", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cluster-size", type=_int_pair, default=None, metavar="LO,HI")
    c.add_argument("--degree", type=_int_pair, default=None, metavar="LO,HI")
    c.add_argument("--inter", type=int, default=2)
    c.add_argument("--priorities", type=_int_pair, default=None, metavar="LO,HI")
    c.add_argument("--owner-bias", type=float, default=0.5)
    c.set_defaults(func=_cmd_gen)
    f = gen_sub.add_parser("fixture", help="named fixture: g1, g2, g3, locality:<n>")
    f.add_argument("fixture")
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=_cmd_gen)

    p = sub.add_parser("verify", help="check a solution against its game")
    p.add_argument("--game", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("convert", help="re-emit a game canonically or as DOT")
    p.add_argument("game")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("bench", help="global vs local comparison table")
    p.add_argument("--sizes", required=True, help="comma-separated node counts")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", metavar="PATH", help="write the table here instead of stdout")
    p.add_argument("--plot", metavar="PATH", help="render a comparison figure")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (PolicyContractError, SolverInvariantError) as err:
        print(f"invariant failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
