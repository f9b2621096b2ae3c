"""Parity game arenas: data model, attractors, subgames, strategy checking.

Nodes are dense 0-based integers. A node with an empty successor list is a
sink; a play that halts there is lost by the sink's owner, since that player
must move and cannot. Games need not be total and need not be turn-based.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol

Strategy = dict[int, int]
"""Partial map from a player's nodes to the chosen successor."""


def opponent(p: int) -> int:
    """Return the other player."""
    if p not in (0, 1):
        raise ValueError(f"player must be 0 or 1, got {p!r}")
    return 1 - p


@dataclass
class ParityGame:
    """Explicit game graph with per-node owner, priority and successor list.

    Instances should be treated as frozen once built: predecessor lists are
    derived lazily and cached, so mutating `succ` afterwards is a bug.
    """

    owner: list[int]
    priority: list[int]
    succ: list[list[int]]
    names: list[str | None] | None = None
    _preds: tuple[tuple[int, ...], ...] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    @classmethod
    def from_nodes(
        cls,
        nodes: Iterable[tuple[int, int, Iterable[int]]],
        names: list[str | None] | None = None,
    ) -> "ParityGame":
        """Build a game from (owner, priority, successors) triples."""
        rows = list(nodes)
        return cls(
            owner=[r[0] for r in rows],
            priority=[r[1] for r in rows],
            succ=[list(r[2]) for r in rows],
            names=names,
        )

    @property
    def n(self) -> int:
        return len(self.owner)

    def nodes(self) -> range:
        return range(self.n)

    def is_sink(self, v: int) -> bool:
        return not self.succ[v]

    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        """Transpose of the successor lists, deduplicated, ascending, cached."""
        if self._preds is None:
            preds: list[list[int]] = [[] for _ in range(self.n)]
            for v in range(self.n):
                for u in dict.fromkeys(self.succ[v]):
                    preds[u].append(v)
            self._preds = tuple(tuple(p) for p in preds)
        return self._preds


def validate(game: ParityGame) -> list[str]:
    """Return all well-formedness violations; an empty list means sound."""
    problems: list[str] = []
    n = game.n
    if len(game.priority) != n or len(game.succ) != n:
        problems.append("owner, priority and succ lists must have equal length")
        return problems
    if game.names is not None and len(game.names) != n:
        problems.append("names list length disagrees with node count")
    for v in range(n):
        if game.owner[v] not in (0, 1):
            problems.append(f"node {v}: owner must be 0 or 1, got {game.owner[v]!r}")
        pr = game.priority[v]
        if not isinstance(pr, int) or isinstance(pr, bool) or pr < 0:
            problems.append(f"node {v}: priority must be a non-negative integer, got {pr!r}")
        for u in game.succ[v]:
            if not isinstance(u, int) or isinstance(u, bool) or not 0 <= u < n:
                problems.append(f"node {v}: successor {u!r} is not a node id")
    return problems


def validate_strategy(game: ParityGame, player: int, sigma: Strategy) -> list[str]:
    """Return violations of sigma being a partial strategy for player."""
    problems: list[str] = []
    for v, t in sigma.items():
        if not isinstance(v, int) or not 0 <= v < game.n:
            problems.append(f"strategy source {v!r} is not a node")
            continue
        if game.owner[v] != player:
            problems.append(f"strategy source {v} is not owned by player {player}")
        if t not in game.succ[v]:
            problems.append(f"strategy move {v} -> {t!r} is not a game edge")
    return problems


@dataclass
class AttractorResult:
    region: set[int]
    strategy: Strategy


def generic_attractor(
    target: Iterable[int],
    target_strategy: Strategy,
    player: int,
    in_domain: Callable[[int], bool],
    succs_of: Callable[[int], Iterable[int]],
    preds_of: Callable[[int], Iterable[int]],
    owner_of: Callable[[int], int],
) -> AttractorResult:
    """Backward-worklist attractor over graph callables.

    A node of `player` joins the region once one successor is inside it; any
    other node joins once every successor counted by `succs_of` is. Nodes
    rejected by `in_domain` never join. `preds_of` must yield each edge once.
    Sinks are never attracted: the worklist only reaches a node through one
    of its outgoing edges.
    """
    region = set(target)
    strategy = dict(target_strategy)
    missing: dict[int, int] = {}
    queue = deque(sorted(region))
    while queue:
        w = queue.popleft()
        for u in sorted(preds_of(w)):
            if u in region or not in_domain(u):
                continue
            if owner_of(u) == player:
                region.add(u)
                strategy[u] = w
                queue.append(u)
            else:
                left = missing.get(u)
                if left is None:
                    left = len(set(succs_of(u)))
                left -= 1
                missing[u] = left
                if left == 0:
                    region.add(u)
                    queue.append(u)
    return AttractorResult(region, strategy)


def attractor(
    game: ParityGame,
    player: int,
    target: Iterable[int],
    target_strategy: Strategy | None = None,
    domain: Iterable[int] | None = None,
) -> AttractorResult:
    """Least region within `domain` from which `player` can force `target`.

    Opponent nodes are attracted only when every successor in the full game
    lies in the region: a single escape edge, even one leaving the domain,
    keeps them out. Newly attracted nodes owned by `player` get a witnessing
    edge added to a copy of `target_strategy`.
    """
    if player not in (0, 1):
        raise ValueError(f"player must be 0 or 1, got {player!r}")
    target = set(target)
    dom = set(range(game.n)) if domain is None else set(domain)
    if not target <= dom:
        raise ValueError("target must lie inside the domain")
    strategy = dict(target_strategy) if target_strategy else {}
    for v, t in strategy.items():
        if v not in target or game.owner[v] != player or t not in game.succ[v]:
            raise ValueError(
                f"target strategy entry {v} -> {t} is not a player-{player} move on the target"
            )
    preds = game.predecessors()
    return generic_attractor(
        target,
        strategy,
        player,
        in_domain=dom.__contains__,
        succs_of=lambda v: game.succ[v],
        preds_of=lambda v: preds[v],
        owner_of=lambda v: game.owner[v],
    )


def strategy_subgame(game: ParityGame, player: int, sigma: Strategy) -> ParityGame:
    """Restrict `player`'s moves to `sigma`; their unmapped nodes become sinks.

    Other players' edges are untouched. Node count, owners, priorities and
    names carry over unchanged.
    """
    bad = validate_strategy(game, player, sigma)
    if bad:
        raise ValueError("; ".join(bad))
    succ: list[list[int]] = []
    for v in range(game.n):
        if game.owner[v] != player:
            succ.append(list(game.succ[v]))
        elif v in sigma:
            succ.append([sigma[v]])
        else:
            succ.append([])
    return ParityGame(
        owner=list(game.owner),
        priority=list(game.priority),
        succ=succ,
        names=list(game.names) if game.names is not None else None,
    )


@dataclass
class StrategyCheck:
    """Outcome of verify_winning_strategy: ok flag plus first counterexample."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _restricted_successors(
    game: ParityGame, player: int, region: set[int], sigma: Strategy
) -> dict[int, list[int]]:
    rsucc: dict[int, list[int]] = {}
    for v in region:
        if game.owner[v] == player:
            rsucc[v] = [sigma[v]]
        else:
            rsucc[v] = [u for u in dict.fromkeys(game.succ[v]) if u in region]
    return rsucc


def _cyclic_sccs(nodes: list[int], succs: dict[int, list[int]]) -> Iterable[list[int]]:
    """Tarjan's algorithm, iterative; yields SCCs that contain a cycle."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succs[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if u not in index:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack.add(u)
                    work.append((u, iter(succs[u])))
                    advanced = True
                    break
                if u in on_stack:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == v:
                        break
                if len(scc) > 1 or scc[0] in succs[scc[0]]:
                    yield scc


def verify_winning_strategy(
    game: ParityGame, player: int, region: Iterable[int], sigma: Strategy
) -> StrategyCheck:
    """Check that `sigma` wins every play started inside `region` for `player`.

    Verifies that the strategy and the opponent's moves stay inside the
    region, that no cycle of the restricted subgraph has its maximal
    priority on the opponent's parity, and that plays can only halt in
    opponent-owned sinks.
    """
    region = set(region)
    for v in sorted(region):
        if game.owner[v] == player:
            t = sigma.get(v)
            if t is None:
                return StrategyCheck(False, f"node {v}: player {player} has no strategy move")
            if t not in game.succ[v]:
                return StrategyCheck(False, f"node {v}: strategy move {t} is not an edge")
            if t not in region:
                return StrategyCheck(False, f"node {v}: strategy move {t} leaves the region")
        else:
            for u in game.succ[v]:
                if u not in region:
                    return StrategyCheck(False, f"node {v}: opponent escape edge to {u}")
    # Region closure established. Player-owned nodes each keep exactly one
    # move, so the only sinks left in the restricted subgraph are
    # opponent-owned game sinks, which the player wins by the chooser rule.
    rsucc = _restricted_successors(game, player, region, sigma)
    bad_priorities = sorted(
        {game.priority[v] for v in region if game.priority[v] % 2 != player}, reverse=True
    )
    for p in bad_priorities:
        level = [v for v in sorted(region) if game.priority[v] <= p]
        inside = set(level)
        level_succ = {v: [u for u in rsucc[v] if u in inside] for v in level}
        for scc in _cyclic_sccs(level, level_succ):
            if any(game.priority[v] == p for v in scc):
                where = min(v for v in scc if game.priority[v] == p)
                return StrategyCheck(
                    False, f"cycle through node {where} has maximal priority {p}"
                )
    return StrategyCheck(True)


def make_turn_based(game: ParityGame) -> tuple[ParityGame, list[int]]:
    """Insert a relay node on every same-owner edge so that moves alternate.

    Returns the new game and a projection list mapping every new node to the
    input node that decides its winner: original nodes map to themselves,
    relays to their unique successor. An already turn-based game is returned
    unchanged with the identity projection.

    Relays take the minimal priority present in the input, which never
    changes the maximal priority of a cycle because every cycle still passes
    through an original node.
    """
    n = game.n
    if all(game.owner[u] != game.owner[v] for u in range(n) for v in game.succ[u]):
        return game, list(range(n))
    relay_priority = min(game.priority)
    owner = list(game.owner)
    priority = list(game.priority)
    succ: list[list[int]] = [[] for _ in range(n)]
    names = list(game.names) if game.names is not None else None
    origin = list(range(n))
    for u in range(n):
        for v in game.succ[u]:
            if game.owner[u] != game.owner[v]:
                succ[u].append(v)
                continue
            relay = len(owner)
            owner.append(opponent(game.owner[u]))
            priority.append(relay_priority)
            succ.append([v])
            succ[u].append(relay)
            origin.append(v)
            if names is not None:
                names.append(None)
    return ParityGame(owner=owner, priority=priority, succ=succ, names=names), origin


class GameSource(Protocol):
    """On-the-fly access to a game graph.

    query(v) returns (owner, priority, successors) for node v and must be
    pure: repeated queries see identical answers.
    """

    def query(self, v: int) -> tuple[int, int, tuple[int, ...]]: ...


@dataclass(eq=False)
class ExplicitGameSource:
    """GameSource view of an explicit game, with a start hint for solvers."""

    game: ParityGame
    start: int = 0

    def query(self, v: int) -> tuple[int, int, tuple[int, ...]]:
        g = self.game
        return g.owner[v], g.priority[v], tuple(g.succ[v])


class CountingSource:
    """Wrapper that counts distinct queried nodes, the visited-set size."""

    def __init__(self, base: GameSource):
        self.base = base
        self.seen: set[int] = set()

    @property
    def visited(self) -> int:
        return len(self.seen)

    def query(self, v: int) -> tuple[int, int, tuple[int, ...]]:
        self.seen.add(v)
        return self.base.query(v)
