"""Orders and valuations for strategy improvement.

A node valuation is either a finite set of nodes (a play prefix that ends
with an escape decision) or INFINITY, the best possible outcome for the
player under evaluation. Valuations are compared per player through the
reward order on the most relevant node where two prefixes disagree.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Union

from .errors import SolverInvariantError
from .game import ParityGame, Strategy, validate_strategy


class _Infinity:
    """Top valuation; a play the evaluated player wins outright."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "Infinity"


INFINITY = _Infinity()

Valuation = Union[frozenset, _Infinity]

PriorityOf = Callable[[int], int]


def relevance_key(game: ParityGame, v: int):
    """Sort key for the relevance order: priority first, node id as tie-break."""
    return game.priority[v], v


def _reward_key(priority_of: PriorityOf, q: int, v: int):
    pr = priority_of(v)
    if pr % 2 == q % 2:
        return 1, pr, v
    return 0, -pr, -v


def reward_key(game: ParityGame, q: int, v: int):
    """Sort key for player q's reward order.

    Nodes with q's parity are all better than nodes without it; among good
    nodes higher relevance wins, among bad nodes it loses.
    """
    return _reward_key(game.priority.__getitem__, q, v)


def reward_less(game: ParityGame, q: int, v: int, u: int) -> bool:
    """Strict reward order on distinct nodes."""
    if v == u:
        raise ValueError("reward_less needs two distinct nodes")
    return reward_key(game, q, v) < reward_key(game, q, u)


def val_equal(a: Valuation, b: Valuation) -> bool:
    if a is INFINITY or b is INFINITY:
        return a is b
    return set(a) == set(b)


def _val_less(priority_of: PriorityOf, q: int, a: Valuation, b: Valuation) -> bool:
    if val_equal(a, b):
        raise ValueError("val_less needs two distinct valuations")
    if a is INFINITY:
        return False
    if b is INFINITY:
        return True
    diff = set(a) ^ set(b)
    d = max(diff, key=lambda v: (priority_of(v), v))
    if priority_of(d) % 2 == q % 2:
        return d in b
    return d in a


def val_less(game: ParityGame, q: int, a: Valuation, b: Valuation) -> bool:
    """Strict valuation order for player q; INFINITY is the maximum.

    Finite sets are decided by the most relevant node in their symmetric
    difference: owning it is good when its priority has q's parity and bad
    otherwise. Equal arguments are a caller bug and raise.
    """
    return _val_less(game.priority.__getitem__, q, a, b)


def val_leq(game: ParityGame, q: int, a: Valuation, b: Valuation) -> bool:
    return val_equal(a, b) or val_less(game, q, a, b)


def _val_min(priority_of: PriorityOf, q: int, values: Iterable[Valuation]) -> Valuation:
    best = None
    for theta in values:
        if best is None or (not val_equal(theta, best) and _val_less(priority_of, q, theta, best)):
            best = theta
    if best is None:
        raise ValueError("minimum of no valuations")
    return best


def add_node(theta: Valuation, v: int) -> Valuation:
    """Prefix extension: INFINITY once the added node closes the prefix."""
    if theta is INFINITY or v in theta:
        return INFINITY
    return frozenset(theta) | {v}


def path_theta(q: int, pi: Iterable[int], game: ParityGame) -> Valuation:
    """Value of a loopless path for player q.

    INFINITY when the path ends at an opponent node (the opponent ran out
    of moves), otherwise the set of visited nodes.
    """
    path = list(pi)
    if not path:
        raise ValueError("path must be non-empty")
    if len(set(path)) != len(path):
        raise ValueError("path must be loopless")
    for a, b in zip(path, path[1:]):
        if b not in game.succ[a]:
            raise ValueError(f"step {a} -> {b} is not a game edge")
    if game.owner[path[-1]] != q:
        return INFINITY
    return frozenset(path)


def propagate(
    q: int,
    xi: dict[int, Valuation],
    sigma: Strategy,
    seed: Iterable[int],
    owner_of: Callable[[int], int],
    priority_of: PriorityOf,
    succs_of: Callable[[int], Iterable[int]],
    preds_of: Callable[[int], Iterable[int]],
    fuel: int,
) -> tuple[set[int], int]:
    """Re-establish valuation consistency by change propagation.

    Each popped node gets its value recomputed from its successors: the
    strategy target for mapped q-nodes, the singleton escape for unmapped
    q-nodes, the valuation minimum over `succs_of` for opponent nodes (an
    empty choice set yields INFINITY, the stuck-opponent case). Changes
    enqueue predecessors. Returns every node whose stored value changed
    plus the number of recomputation steps taken.

    `fuel` bounds the number of recomputations; running out raises
    SolverInvariantError since the fixpoint should always be reached.
    """
    queue = deque(sorted(set(seed)))
    queued = set(queue)
    changed: set[int] = set()
    steps = 0
    while queue:
        if fuel <= 0:
            raise SolverInvariantError("valuation propagation did not stabilize")
        fuel -= 1
        steps += 1
        v = queue.popleft()
        queued.discard(v)
        if owner_of(v) == q:
            if v in sigma:
                new = add_node(xi[sigma[v]], v)
            else:
                new = frozenset({v})
        else:
            options = [add_node(xi[u], v) for u in dict.fromkeys(succs_of(v))]
            new = INFINITY if not options else _val_min(priority_of, q, options)
        if val_equal(new, xi[v]):
            continue
        xi[v] = new
        changed.add(v)
        for u in preds_of(v):
            if u not in queued and u in xi:
                queue.append(u)
                queued.add(u)
    return changed, steps


def _propagation_fuel(n: int, m: int) -> int:
    # Comfortably above anything observed; a tripwire, not a budget.
    return 64 + 4 * n * n * (1 + m)


def evaluate_strategy(game: ParityGame, q: int, sigma: Strategy) -> dict[int, Valuation]:
    """Best-play valuation of every node for player q under strategy sigma.

    q-nodes follow sigma where defined and stop (escape) where not; the
    opponent always picks the successor worst for q. On arenas whose edges
    all join opposite owners the result is the unique valuation consistent
    with those local rules. Same-owner edges can leave the rules with
    several solutions (propagation then risks the fuel tripwire), which is
    why the solvers normalize before evaluating.
    """
    bad = validate_strategy(game, q, sigma)
    if bad:
        raise ValueError("; ".join(bad))
    xi: dict[int, Valuation] = {v: frozenset() for v in game.nodes()}
    preds = game.predecessors()
    edges = sum(len(s) for s in game.succ)
    propagate(
        q,
        xi,
        sigma,
        game.nodes(),
        owner_of=game.owner.__getitem__,
        priority_of=game.priority.__getitem__,
        succs_of=game.succ.__getitem__,
        preds_of=preds.__getitem__,
        fuel=_propagation_fuel(game.n, edges),
    )
    return xi


def counter_strategy(game: ParityGame, q: int, xi: dict[int, Valuation]) -> Strategy:
    """Opponent response: per opponent node the valuation-minimal successor.

    Ties between equally bad successors go to the reward-order-minimal node,
    so the result is unique. Opponent sinks stay out of the domain.
    """
    tau: Strategy = {}
    for v in game.nodes():
        if game.owner[v] == q or not game.succ[v]:
            continue
        options = list(dict.fromkeys(game.succ[v]))
        best = _val_min(game.priority.__getitem__, q, [xi[u] for u in options])
        pool = [u for u in options if val_equal(xi[u], best)]
        tau[v] = min(pool, key=lambda u: reward_key(game, q, u))
    return tau


def consistent_nodes(
    game: ParityGame, q: int, sigma: Strategy, xi: dict[int, Valuation]
) -> set[int]:
    """Nodes whose stored valuation already satisfies their local rule."""
    out: set[int] = set()
    for v in game.nodes():
        if game.owner[v] == q:
            want = add_node(xi[sigma[v]], v) if v in sigma else frozenset({v})
        elif game.succ[v]:
            options = [add_node(xi[u], v) for u in dict.fromkeys(game.succ[v])]
            want = _val_min(game.priority.__getitem__, q, options)
        else:
            want = INFINITY
        if val_equal(xi[v], want):
            out.add(v)
    return out


def is_improvement_edge(
    game: ParityGame, q: int, sigma: Strategy, xi: dict[int, Valuation], v: int, u: int
) -> bool:
    """True when switching v to u strictly improves v's prospects.

    The value of the current choice (the empty escape prefix when v has no
    choice yet) is compared against the target's value directly, without
    appending v. When u's prefix already contains v the comparison then
    ranges exactly over the cycle the switch would close, so a cycle is
    endorsed precisely when its most relevant node favours player q.
    """
    base: Valuation = xi[sigma[v]] if v in sigma else frozenset()
    cand = xi[u]
    if val_equal(base, cand):
        return False
    return val_less(game, q, base, cand)


def improvable_nodes(
    game: ParityGame, q: int, sigma: Strategy, xi: dict[int, Valuation]
) -> set[int]:
    """q-nodes with at least one strictly improving edge."""
    return {
        v
        for v in game.nodes()
        if game.owner[v] == q
        and any(is_improvement_edge(game, q, sigma, xi, v, u) for u in game.succ[v])
    }
