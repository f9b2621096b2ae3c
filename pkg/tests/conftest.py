"""Shared fixtures, random samplers, and a path-walking valuation oracle.

The oracle here enumerates loopless paths outright and is deliberately
independent of the worklist propagation it is used to check.
"""

import random

import pytest

from pgsi.game import ParityGame
from pgsi.generators import gen_cycle_pair, gen_sink, gen_two_cycle_choice
from pgsi.valuation import INFINITY, evaluate_strategy, is_improvement_edge


@pytest.fixture
def g1():
    """Two-node cycle with even top priority: player 0 wins everywhere."""
    return gen_cycle_pair()


@pytest.fixture
def g2():
    """Player-0 node choosing between return priorities 2 and 3."""
    return gen_two_cycle_choice()


@pytest.fixture
def g3():
    """Lone player-0 sink."""
    return gen_sink()


def random_game(rng: random.Random, max_nodes: int = 7, sink_chance: float = 0.15) -> ParityGame:
    """Small random game; sinks allowed, successor lists duplicate-free."""
    n = rng.randint(1, max_nodes)
    nodes = []
    for _v in range(n):
        if rng.random() < sink_chance:
            succs: list[int] = []
        else:
            succs = rng.sample(range(n), rng.randint(1, min(3, n)))
        nodes.append((rng.randint(0, 1), rng.randint(0, 6), succs))
    return ParityGame.from_nodes(nodes)


def random_alternating_game(
    rng: random.Random, max_nodes: int = 10, sink_chance: float = 0.0
) -> ParityGame:
    """Random game where every edge joins opposite owners."""
    n = rng.randint(2, max_nodes)
    owners = [rng.randint(0, 1) for _ in range(n)]
    if len(set(owners)) == 1:
        owners[0] = 1 - owners[0]
    nodes = []
    for v in range(n):
        other = [u for u in range(n) if owners[u] != owners[v]]
        if sink_chance and rng.random() < sink_chance:
            succs: list[int] = []
        else:
            succs = rng.sample(other, rng.randint(1, min(3, len(other))))
        nodes.append((owners[v], rng.randint(0, 6), succs))
    return ParityGame.from_nodes(nodes)


def random_partial_strategy(rng: random.Random, game: ParityGame, q: int) -> dict[int, int]:
    """Bind about half of player q's non-sink nodes to a random successor."""
    sigma = {}
    for v in game.nodes():
        if game.owner[v] == q and game.succ[v] and rng.random() < 0.5:
            sigma[v] = rng.choice(game.succ[v])
    return sigma


def improvement_sigmas(
    rng: random.Random, game: ParityGame, q: int, cap: int = 12
) -> list[dict[int, int]]:
    """Strategies visited by a run of random improving switches from empty.

    Each round applies a random non-empty subset of the improving edges with
    random targets, so the returned strategies are exactly the kind a solver
    evaluates. Navigation uses the library's own evaluation; value assertions
    made against these strategies stay with the independent path oracle.
    """
    sigma: dict[int, int] = {}
    out = [dict(sigma)]
    for _ in range(cap):
        xi = evaluate_strategy(game, q, sigma)
        cands = {}
        for v in game.nodes():
            if game.owner[v] != q:
                continue
            ups = [u for u in game.succ[v] if is_improvement_edge(game, q, sigma, xi, v, u)]
            if ups:
                cands[v] = ups
        if not cands:
            break
        picked = [v for v in sorted(cands) if rng.random() < 0.7]
        if not picked:
            picked = [rng.choice(sorted(cands))]
        for v in picked:
            sigma[v] = rng.choice(cands[v])
        out.append(dict(sigma))
    return out


def plain_val_less(game: ParityGame, q: int, a, b) -> bool:
    """Strict order on valuations, written straight from the definition.

    Infinity sits on top; distinct finite sets are decided by the most
    relevant node of their symmetric difference.
    """
    if a is INFINITY:
        return False
    if b is INFINITY:
        return True
    if a == b:
        return False
    w = max(a ^ b, key=lambda v: (game.priority[v], v))
    if w in b:
        return game.priority[w] % 2 == q
    return game.priority[w] % 2 != q


def min_path_valuations(game: ParityGame, q: int, sigma: dict[int, int]) -> dict:
    """Minimum path value per node over the loopless paths of G|sigma.

    A q-node without a strategy entry stops the walk with the finite value
    frozenset(path); its remaining edges are not followed (escape default).
    A stuck opponent node is worth Infinity, and so is a walk whose every
    move would re-enter its own path, matching cycle closure under the add
    operation. Exponential, so callers keep games at toy size.
    """

    def moves(v: int) -> list[int]:
        if game.owner[v] == q:
            return [sigma[v]] if v in sigma else []
        return game.succ[v]

    def best_from(start: int):
        best = None

        def consider(theta):
            nonlocal best
            if best is None or plain_val_less(game, q, theta, best):
                best = theta

        def walk(v: int, path: list[int], on_path: set[int]):
            nxt = moves(v)
            if not nxt:
                consider(INFINITY if game.owner[v] != q else frozenset(path))
                return
            live = [u for u in nxt if u not in on_path]
            if not live:
                consider(INFINITY)
                return
            for u in live:
                path.append(u)
                on_path.add(u)
                walk(u, path, on_path)
                path.pop()
                on_path.discard(u)

        walk(start, [start], {start})
        return best

    return {v: best_from(v) for v in game.nodes()}
