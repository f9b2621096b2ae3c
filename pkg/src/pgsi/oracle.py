"""Reference solvers used to anchor the strategy-improvement implementations.

Both are deliberately independent of the valuation machinery: one enumerates
positional strategies outright, the other is the classic attractor recursion
on the maximal priority, extended to games with sinks.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass

from .errors import SolverInvariantError
from .game import ParityGame, Strategy, _cyclic_sccs, generic_attractor


@dataclass
class OracleSolution:
    """Full partition of the nodes plus a witness strategy per player."""

    regions: tuple[set[int], set[int]]
    strategies: tuple[Strategy, Strategy]

    def winner(self, v: int) -> int:
        return 0 if v in self.regions[0] else 1


def _deduped_succs(game: ParityGame) -> list[list[int]]:
    return [list(dict.fromkeys(game.succ[v])) for v in game.nodes()]


def _mover_win_set(game: ParityGame, fixed: int, sigma: Strategy) -> set[int]:
    """Nodes from which the moving player (1 - fixed) wins against sigma.

    With the fixed player's choices pinned, the remaining graph is fully
    controlled by the mover, who wins from v exactly when some path reaches
    a fixed-owned sink or a cycle whose maximal priority has the mover's
    parity.
    """
    mover = 1 - fixed
    succs: dict[int, list[int]] = {}
    for v in game.nodes():
        if game.owner[v] == fixed and game.succ[v]:
            succs[v] = [sigma[v]]
        else:
            succs[v] = list(dict.fromkeys(game.succ[v]))
    targets = {v for v in game.nodes() if not succs[v] and game.owner[v] == fixed}
    mover_priorities = sorted(
        {game.priority[v] for v in game.nodes() if game.priority[v] % 2 == mover}
    )
    for p in mover_priorities:
        level = [v for v in game.nodes() if game.priority[v] <= p]
        inside = set(level)
        level_succ = {v: [u for u in succs[v] if u in inside] for v in level}
        for scc in _cyclic_sccs(level, level_succ):
            for w in scc:
                if game.priority[w] == p:
                    targets.add(w)
    # backward closure: anything that can reach a target wins for the mover
    preds: list[list[int]] = [[] for _ in game.nodes()]
    for v in game.nodes():
        for u in succs[v]:
            preds[u].append(v)
    reach = set(targets)
    stack = list(targets)
    while stack:
        w = stack.pop()
        for u in preds[w]:
            if u not in reach:
                reach.add(u)
                stack.append(u)
    return reach


def _strategy_space(game: ParityGame, player: int):
    choice_nodes = [v for v in game.nodes() if game.owner[v] == player and game.succ[v]]
    options = [list(dict.fromkeys(game.succ[v])) for v in choice_nodes]
    return choice_nodes, options


def solve_exhaustive(game: ParityGame) -> OracleSolution:
    """Solve a tiny game by enumerating positional strategies.

    Guarded to at most 10 nodes and at most 10^6 strategy combinations.
    A node belongs to a player's region when some enumerated strategy of
    that player defeats every opposing play from it; the witness strategy
    is the first one winning on the whole region.
    """
    if game.n > 10:
        raise ValueError(f"exhaustive oracle is limited to 10 nodes, got {game.n}")
    combos = 1
    for v in game.nodes():
        combos *= max(1, len(set(game.succ[v])))
    if combos > 10**6:
        raise ValueError("exhaustive oracle is limited to 10^6 strategy combinations")

    regions: list[set[int]] = []
    witnesses: list[Strategy] = []
    for player in (0, 1):
        choice_nodes, options = _strategy_space(game, player)
        best: set[int] = set()
        for picks in itertools.product(*options):
            sigma = dict(zip(choice_nodes, picks))
            best |= set(game.nodes()) - _mover_win_set(game, player, sigma)
        witness: Strategy = {}
        for picks in itertools.product(*options):
            sigma = dict(zip(choice_nodes, picks))
            if set(game.nodes()) - _mover_win_set(game, player, sigma) == best:
                witness = sigma
                break
        regions.append(best)
        witnesses.append(witness)

    if regions[0] | regions[1] != set(game.nodes()) or regions[0] & regions[1]:
        raise SolverInvariantError("exhaustive oracle regions do not partition the nodes")
    return OracleSolution((regions[0], regions[1]), (witnesses[0], witnesses[1]))


def solve_recursive(game: ParityGame) -> OracleSolution:
    """Attractor recursion on the maximal priority, with a sink pre-pass.

    Dead ends of the current subgame are charged to their owner's opponent
    and attracted before the standard recursion; removing an attractor never
    creates new dead ends, so the recursion proper runs on total subgames.
    """
    succs = _deduped_succs(game)
    preds = game.predecessors()
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * game.n + 1000))

    def attract(domain: set[int], player: int, target: set[int], target_strategy: Strategy):
        result = generic_attractor(
            target,
            target_strategy,
            player,
            in_domain=domain.__contains__,
            succs_of=lambda v: [u for u in succs[v] if u in domain],
            preds_of=lambda v: [u for u in preds[v] if u in domain],
            owner_of=game.owner.__getitem__,
        )
        return result.region, result.strategy

    def solve(domain: set[int]) -> tuple[set[int], set[int], Strategy, Strategy]:
        if not domain:
            return set(), set(), {}, {}

        for stuck in (1, 0):
            dead = {
                v
                for v in domain
                if game.owner[v] == stuck and not any(u in domain for u in succs[v])
            }
            if dead:
                winner = 1 - stuck
                region, tau = attract(domain, winner, dead, {})
                rest = solve(domain - region)
                w = {winner: rest[winner] | region, stuck: rest[stuck]}
                s = {winner: {**rest[2 + winner], **tau}, stuck: rest[2 + stuck]}
                return w[0], w[1], s[0], s[1]

        top = max(game.priority[v] for v in domain)
        p = top % 2
        bunch = {v for v in domain if game.priority[v] == top}
        region, tau = attract(domain, p, bunch, {})
        sub = solve(domain - region)
        w_p, w_opp = sub[p], sub[1 - p]
        s_p, s_opp = sub[2 + p], sub[3 - p]
        if not w_opp:
            sigma = dict(s_p)
            sigma.update(tau)
            for v in sorted(bunch):
                if game.owner[v] == p:
                    sigma[v] = min(u for u in succs[v] if u in domain)
            w = {p: set(domain), 1 - p: set()}
            s = {p: sigma, 1 - p: s_opp}
            return w[0], w[1], s[0], s[1]

        cut, rho = attract(domain, 1 - p, w_opp, s_opp)
        rest = solve(domain - cut)
        w = {1 - p: rest[1 - p] | cut, p: rest[p]}
        s = {1 - p: {**rest[3 - p], **rho}, p: rest[2 + p]}
        return w[0], w[1], s[0], s[1]

    w0, w1, s0, s1 = solve(set(game.nodes()))
    if w0 | w1 != set(game.nodes()) or w0 & w1:
        raise SolverInvariantError("recursive oracle regions do not partition the nodes")
    return OracleSolution((w0, w1), (s0, s1))
