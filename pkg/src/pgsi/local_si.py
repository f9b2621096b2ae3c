"""Local strategy iteration: decide one start node, exploring on demand.

The solver never reads the whole game. Each player q keeps a private view of
what has been pulled from the source so far: an explored subgraph U, a
frontier E of known-but-unexplored nodes, a valuation over U, a partial
strategy, a dirty set C of nodes whose valuation may be stale, and a cache I
of improvable nodes. Nodes proven won by either player move into shared
decided regions with witness strategies and are cut out of both views.

Sources are normalized on the fly: source node v appears as 2*v and every
same-owner edge is spliced with an odd-id relay node owned by the other
player. The valuation calculus reads a cycle that never consults player q as
won by q, which is only sound when moves alternate; relays restore that
without changing winners, since every cycle still contains a source node and
the relay priority 0 can never shift the maximum priority's parity. All
reported regions, strategies, and trace payloads are projected back to
source ids.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .errors import PolicyContractError, SolverInvariantError
from .game import (
    CountingSource,
    ExplicitGameSource,
    GameSource,
    ParityGame,
    Strategy,
    generic_attractor,
    opponent,
)
from .valuation import (
    INFINITY,
    Valuation,
    _reward_key,
    _val_less,
    _val_min,
    add_node,
    propagate,
    val_equal,
)

NodeInfo = tuple[int, int, tuple[int, ...]]


class NormalizedSource:
    """Lazy alternating-move view of any source.

    Source node v is exposed as 2*v. A same-owner edge (v, u) is routed
    through a relay with a fresh odd id, owner flipped, priority 0. Base
    query results are cached, so each source node is pulled at most once
    no matter how often its normalized image is asked for.
    """

    def __init__(self, base: GameSource):
        self.base = base
        self._cache: dict[int, NodeInfo] = {}
        self._relay_of: dict[tuple[int, int], int] = {}
        self._relay_data: dict[int, tuple[int, int]] = {}
        self._next_relay = 1

    def _pull(self, v: int) -> NodeInfo:
        got = self._cache.get(v)
        if got is None:
            got = self.base.query(v)
            self._cache[v] = got
        return got

    def query(self, node: int) -> NodeInfo:
        if node % 2 == 0:
            owner, priority, succs = self._pull(node // 2)
            out = []
            for u in succs:
                if self._pull(u)[0] != owner:
                    out.append(2 * u)
                    continue
                key = (node // 2, u)
                relay = self._relay_of.get(key)
                if relay is None:
                    relay = self._next_relay
                    self._next_relay += 2
                    self._relay_of[key] = relay
                    self._relay_data[relay] = (opponent(owner), 2 * u)
                out.append(relay)
            return owner, priority, tuple(out)
        owner, target = self._relay_data[node]
        return owner, 0, (target,)

    def raw(self, node: int) -> int:
        """Source id behind a normalized node; relays map to their target."""
        if node % 2 == 0:
            return node // 2
        return self._relay_data[node][1] // 2


@dataclass
class LocalStats:
    """Work counters; visited is the number of distinct source nodes pulled."""

    visited: int = 0
    expanded: int = 0
    improvements: int = 0
    evaluation_steps: int = 0
    stuck_sinks: int = 0


@dataclass
class PlayerLocalData:
    """One player's private view. Letters match the usual U/E/I/C naming."""

    explored: set[int] = field(default_factory=set)
    frontier: dict[int, None] = field(default_factory=dict)
    improvable: set[int] = field(default_factory=set)
    dirty: dict[int, None] = field(default_factory=dict)
    valuation: dict[int, Valuation] = field(default_factory=dict)
    strategy: Strategy = field(default_factory=dict)


@dataclass
class LocalState:
    start: int
    data: tuple[PlayerLocalData, PlayerLocalData]
    won: tuple[set[int], set[int]]
    witness: tuple[Strategy, Strategy]
    current: int
    cache: dict[int, NodeInfo]
    preds: dict[int, set[int]]
    stats: LocalStats


@dataclass
class LocalSolution:
    winner: int
    start: int
    regions: tuple[set[int], set[int]]
    strategies: tuple[Strategy, Strategy]
    stats: LocalStats

    @property
    def visited(self) -> int:
        return self.stats.visited


def new_local_state(start: int) -> LocalState:
    """Fresh state: both frontiers hold exactly the start node."""
    state = LocalState(
        start=start,
        data=(PlayerLocalData(), PlayerLocalData()),
        won=(set(), set()),
        witness=({}, {}),
        current=0,
        cache={},
        preds={},
        stats=LocalStats(),
    )
    for d in state.data:
        d.frontier[start] = None
    return state


def _know(state: LocalState, source: GameSource, v: int) -> NodeInfo:
    got = state.cache.get(v)
    if got is None:
        got = source.query(v)
        state.cache[v] = got
        for u in got[2]:
            state.preds.setdefault(u, set()).add(v)
    return got


def winning_update(
    state: LocalState, q: int, fresh: set[int], witness: Strategy
) -> set[int]:
    """Absorb nodes newly proven won by q; returns everything decided by it.

    The fresh set is attracted over both explored subgraphs (universal rule
    counts all graph successors, so older q-wins back the attraction), then
    every newly decided node is cut out of both players' books: frontiers,
    improvable caches, valuations, and strategy entries touching it. Explored
    predecessors of the decided nodes are marked dirty, as are sources of
    strategy edges that lost their target.
    """
    if not fresh:
        return set()
    won_q = state.won[q]
    unknown = [v for v in fresh if v not in state.cache and v not in won_q]
    if unknown:
        raise ValueError(f"winning nodes {sorted(unknown)[:4]} were never queried")
    if fresh & state.won[opponent(q)]:
        raise ValueError("winning set overlaps the other player's region")

    seed_strategy = dict(state.witness[q])
    seed_strategy.update(witness)
    explored_union = state.data[0].explored | state.data[1].explored
    result = generic_attractor(
        target=fresh | won_q,
        target_strategy=seed_strategy,
        player=q,
        in_domain=lambda v: v in explored_union,
        succs_of=lambda v: state.cache[v][2],
        preds_of=lambda v: sorted(state.preds.get(v, ())),
        owner_of=lambda v: state.cache[v][0],
    )
    delta = result.region - won_q
    won_q.update(delta)
    state.witness[q].update(
        {v: t for v, t in result.strategy.items() if v in won_q}
    )

    border: set[int] = set()
    for v in delta:
        border.update(state.preds.get(v, ()))
    for d in state.data:
        survivors = [c for c in d.dirty if c not in delta]
        touched = sorted(v for v in d.explored if v not in delta and v in border)
        dropped_sources = []
        for v, t in list(d.strategy.items()):
            if v in delta:
                del d.strategy[v]
            elif t in delta:
                del d.strategy[v]
                dropped_sources.append(v)
        d.explored -= delta
        d.improvable -= delta
        for v in delta:
            d.frontier.pop(v, None)
            d.valuation.pop(v, None)
        d.dirty = dict.fromkeys(survivors + touched + sorted(dropped_sources))
    return delta


def expand(state: LocalState, source: GameSource, q: int, chosen) -> None:
    """Grow player q's subgraph by the chosen frontier nodes.

    Each processed node is resolved on sight where possible: if its owner
    already has an edge into their won region it is decided immediately, and
    a node none of whose moves avoid the opposing region is given up without
    entering the subgraph. Sinks take neither shortcut; they enter the
    subgraph and fall out through evaluation or the dead-end rule, keeping
    the evaluated view the sole judge of finite plays. Otherwise successors
    of q's own nodes feed the frontier while successors of opponent nodes
    are explored right away, so the opponent's choices are never guessed.
    """
    picked = list(dict.fromkeys(chosen))
    if not picked:
        raise ValueError("expansion set must not be empty")
    d = state.data[q]
    bad = [v for v in picked if v not in d.frontier]
    if bad:
        raise ValueError(f"nodes {sorted(bad)[:4]} are not frontier nodes of player {q}")

    pending: tuple[dict[int, None], dict[int, None]] = ({}, {})
    pending_witness: tuple[Strategy, Strategy] = ({}, {})
    work = deque(picked)
    enqueued = set(picked)

    def decided(u: int) -> bool:
        return (
            u in state.won[0]
            or u in state.won[1]
            or u in pending[0]
            or u in pending[1]
        )

    while work:
        v = work.popleft()
        if v in d.explored or decided(v):
            continue
        owner, _, succs = _know(state, source, v)
        d.frontier.pop(v, None)
        state.stats.expanded += 1
        escape = next(
            (u for u in succs if u in state.won[owner] or u in pending[owner]), None
        )
        if escape is not None:
            pending[owner][v] = None
            pending_witness[owner][v] = escape
            continue
        other = opponent(owner)
        if succs and all(u in state.won[other] or u in pending[other] for u in succs):
            pending[other][v] = None
            continue
        d.explored.add(v)
        d.valuation[v] = frozenset()
        d.dirty[v] = None
        if owner == q:
            for u in succs:
                if u not in d.explored and not decided(u) and u not in d.frontier:
                    d.frontier[u] = None
        else:
            for u in succs:
                if u not in d.explored and not decided(u) and u not in enqueued:
                    work.append(u)
                    enqueued.add(u)

    for player in (0, 1):
        if pending[player]:
            winning_update(state, player, set(pending[player]), pending_witness[player])


def _improving_base(d: PlayerLocalData, v: int) -> Valuation:
    return d.valuation[d.strategy[v]] if v in d.strategy else frozenset()


def _explored_succs(state: LocalState, d: PlayerLocalData, v: int) -> list[int]:
    return [u for u in dict.fromkeys(state.cache[v][2]) if u in d.explored]


def _is_local_improvement(state: LocalState, q: int, v: int, u: int) -> bool:
    d = state.data[q]
    base = _improving_base(d, v)
    cand = d.valuation[u]
    if val_equal(base, cand):
        return False
    return _val_less(lambda x: state.cache[x][1], q, base, cand)


def evaluate_local(state: LocalState, q: int) -> tuple[set[int], Strategy]:
    """Re-establish valuation consistency for player q's subgraph.

    Propagates from the dirty set, then refreshes the improvable cache for
    every node whose value or successor values moved. Nodes that reached
    INFINITY are returned as newly won for q together with their strategy
    edges; the caller is expected to feed them to winning_update. The dirty
    set is empty afterwards.
    """
    d = state.data[q]
    if not d.dirty:
        return set(), {}
    seed = list(d.dirty)

    def owner_of(v: int) -> int:
        return state.cache[v][0]

    def priority_of(v: int) -> int:
        return state.cache[v][1]

    def succs_of(v: int) -> list[int]:
        succs = state.cache[v][2]
        out = [u for u in succs if u in d.explored]
        if not out:
            if succs:
                raise SolverInvariantError(
                    f"node {v} kept no explored choices; the winning books are stale"
                )
            state.stats.stuck_sinks += 1
        return out

    def preds_of(v: int) -> list[int]:
        return [u for u in sorted(state.preds.get(v, ())) if u in d.explored]

    inner_edges = sum(len(_explored_succs(state, d, v)) for v in d.explored)
    fuel = 64 + len(d.explored) ** 2 * (1 + inner_edges)
    changed, steps = propagate(
        q,
        d.valuation,
        d.strategy,
        seed,
        owner_of=owner_of,
        priority_of=priority_of,
        succs_of=succs_of,
        preds_of=preds_of,
        fuel=fuel,
    )
    state.stats.evaluation_steps += steps
    d.dirty.clear()

    affected = set(seed) | changed
    for v in changed:
        affected.update(u for u in state.preds.get(v, ()) if u in d.explored)

    won_now: set[int] = set()
    tau: Strategy = {}
    for v in sorted(affected):
        theta = d.valuation[v]
        if theta is INFINITY:
            d.improvable.discard(v)
            won_now.add(v)
            if owner_of(v) == q:
                if v not in d.strategy:
                    raise SolverInvariantError(f"won node {v} has no strategy edge")
                tau[v] = d.strategy[v]
        elif owner_of(v) == q:
            if any(
                _is_local_improvement(state, q, v, u)
                for u in _explored_succs(state, d, v)
            ):
                d.improvable.add(v)
            else:
                d.improvable.discard(v)
    return won_now, tau


def _counter_in_subgraph(state: LocalState, q: int) -> Strategy:
    """Opponent response inside U_q: pointwise valuation-minimal choices."""
    d = state.data[q]
    priority_of = lambda x: state.cache[x][1]
    tau: Strategy = {}
    for v in sorted(d.explored):
        if state.cache[v][0] == q:
            continue
        options = _explored_succs(state, d, v)
        if not options:
            continue
        best = _val_min(priority_of, q, [d.valuation[u] for u in options])
        pool = [u for u in options if val_equal(d.valuation[u], best)]
        tau[v] = min(pool, key=lambda u: _reward_key(priority_of, q, u))
    return tau


def check_invariants(state: LocalState) -> list[str]:
    """Names of violated state invariants, empty when the books are clean.

    Checked per player: subgraph closure (SC), winning closure (WC), winning
    exclusion (WE), border coverage (BE), strategy scope (SS), valuation
    consistency outside the dirty set (VC), and improvable-cache accuracy
    outside the dirty set and its one-edge influence (IC).
    """
    out: list[str] = []
    decided_all = state.won[0] | state.won[1]
    explored_union = state.data[0].explored | state.data[1].explored
    for q in (0, 1):
        d = state.data[q]
        tag = f"player {q}"

        overlap = d.explored & decided_all
        if overlap:
            out.append(f"WE {tag}: explored nodes {sorted(overlap)[:4]} already decided")

        for v in sorted(d.explored):
            owner, _, succs = state.cache[v]
            if owner == q:
                continue
            loose = [u for u in succs if u not in d.explored and u not in decided_all]
            if loose:
                out.append(f"SC {tag}: node {v} has unexplored choices {loose[:4]}")

        frontier = set(d.frontier)
        inside = frontier & (d.explored | decided_all)
        if inside:
            out.append(f"BE {tag}: frontier nodes {sorted(inside)[:4]} not fresh")
        borders = {
            u
            for v in d.explored
            for u in state.cache[v][2]
            if u not in d.explored and u not in decided_all
        }
        missing = borders - frontier
        if missing:
            out.append(f"BE {tag}: border nodes {sorted(missing)[:4]} not in frontier")

        stray = (set(d.strategy) | set(d.strategy.values())) - d.explored
        if stray:
            out.append(f"SS {tag}: strategy touches {sorted(stray)[:4]} outside U")

        dirty = set(d.dirty)
        if not dirty <= d.explored:
            out.append(f"VC {tag}: dirty set leaves U: {sorted(dirty - d.explored)[:4]}")
        priority_of = lambda x: state.cache[x][1]
        for v in sorted(d.explored - dirty):
            owner = state.cache[v][0]
            if owner == q:
                want = (
                    add_node(d.valuation[d.strategy[v]], v)
                    if v in d.strategy
                    else frozenset({v})
                )
            else:
                options = [
                    add_node(d.valuation[u], v) for u in _explored_succs(state, d, v)
                ]
                want = _val_min(priority_of, q, options) if options else INFINITY
            if not val_equal(d.valuation[v], want):
                out.append(f"VC {tag}: node {v} is inconsistent but not dirty")
                break

        if not d.improvable <= d.explored:
            out.append(f"IC {tag}: improvable cache leaves U")
        for v in sorted(d.explored - dirty):
            if state.cache[v][0] != q:
                continue
            options = _explored_succs(state, d, v)
            # A dirty successor still carries Expand's placeholder value, so
            # improvability of v is not yet defined; skip until it settles.
            if any(u in dirty for u in options):
                continue
            truth = any(_is_local_improvement(state, q, v, u) for u in options)
            if truth != (v in d.improvable):
                out.append(f"IC {tag}: node {v} cached as {v in d.improvable}")
                break

        if state.won[q]:
            reach = generic_attractor(
                target=state.won[q],
                target_strategy=dict(state.witness[q]),
                player=q,
                in_domain=lambda v: v in explored_union,
                succs_of=lambda v: state.cache[v][2],
                preds_of=lambda v: sorted(state.preds.get(v, ())),
                owner_of=lambda v: state.cache[v][0],
            )
            extra = reach.region - state.won[q]
            if extra:
                out.append(f"WC {tag}: region missed attracted nodes {sorted(extra)[:4]}")
    return out


class RandomExpansion:
    """Pick one frontier node uniformly; deterministic per seed."""

    def __init__(self, seed: int = 0):
        self._rng = random.Random(seed)

    def pick(self, state: LocalState, q: int) -> list[int]:
        return [self._rng.choice(list(state.data[q].frontier))]


class BfsExpansion:
    """Pick up to `width` frontier nodes in discovery order."""

    def __init__(self, width: int):
        if width < 1:
            raise ValueError("width must be at least 1")
        self.width = width

    def pick(self, state: LocalState, q: int) -> list[int]:
        return list(state.data[q].frontier)[: self.width]


class LocalAllMax:
    """Switch every improvable node to its best explored successor."""

    def pick(self, state: LocalState, q: int) -> list[tuple[int, int]]:
        d = state.data[q]
        pairs = []
        for v in sorted(d.improvable):
            best_u = None
            best_val: Valuation = frozenset()
            for u in _explored_succs(state, d, v):
                if not _is_local_improvement(state, q, v, u):
                    continue
                cand = add_node(d.valuation[u], v)
                better = best_u is None or (
                    not val_equal(cand, best_val)
                    and _val_less(lambda x: state.cache[x][1], q, best_val, cand)
                )
                tie = (
                    best_u is not None
                    and val_equal(cand, best_val)
                    and _reward_key(lambda x: state.cache[x][1], q, u)
                    < _reward_key(lambda x: state.cache[x][1], q, best_u)
                )
                if better or tie:
                    best_u, best_val = u, cand
            if best_u is None:
                raise PolicyContractError(f"cached improvable node {v} has no improvement")
            pairs.append((v, best_u))
        return pairs


class LocalSingleSwitch:
    """Switch one uniformly chosen improvable node to one improving successor."""

    def __init__(self, seed: int = 0):
        self._rng = random.Random(seed)

    def pick(self, state: LocalState, q: int) -> list[tuple[int, int]]:
        d = state.data[q]
        v = self._rng.choice(sorted(d.improvable))
        options = [
            u
            for u in _explored_succs(state, d, v)
            if _is_local_improvement(state, q, v, u)
        ]
        if not options:
            raise PolicyContractError(f"cached improvable node {v} has no improvement")
        return [(v, self._rng.choice(options))]


def random_expansion_policy(seed: int = 0) -> RandomExpansion:
    return RandomExpansion(seed)


def bfs_expansion_policy(width: int) -> BfsExpansion:
    return BfsExpansion(width)


def local_all_max_policy() -> LocalAllMax:
    return LocalAllMax()


def local_single_switch_policy(seed: int = 0) -> LocalSingleSwitch:
    return LocalSingleSwitch(seed)


def solve_local(
    source,
    start: int,
    improvement=None,
    expansion=None,
    *,
    first_player: int = 0,
    check: bool = False,
    observer=None,
) -> LocalSolution:
    """Decide the winner of `start`, pulling nodes from `source` on demand.

    Alternates between the two players' views: the current player expands
    while they have nothing to improve, improves otherwise, and loses their
    whole explored subgraph the moment they can do neither. After every step
    both valuations are re-stabilized and newly won nodes are absorbed into
    the decided regions until the start node falls into one of them.

    `improvement` picks strictly improving switch pairs (default all-max),
    `expansion` picks frontier subsets (default seeded random single node).
    With `check` every step is followed by a full invariant sweep that
    raises SolverInvariantError on the first violation. `observer`, when
    given, receives (kind, payload) trace events with source-id payloads.
    """
    if isinstance(source, ParityGame):
        source = ExplicitGameSource(source)
    if first_player not in (0, 1):
        raise ValueError(f"first player must be 0 or 1, got {first_player!r}")
    improvement = improvement if improvement is not None else local_all_max_policy()
    expansion = expansion if expansion is not None else random_expansion_policy(0)

    counting = CountingSource(source)
    norm = NormalizedSource(counting)
    state = new_local_state(2 * start)
    state.current = first_player

    def raw_nodes(nodes) -> list[int]:
        return sorted({n // 2 for n in nodes if n % 2 == 0})

    def raw_pairs(sig: Strategy) -> list[list[int]]:
        return [[v // 2, norm.raw(t)] for v, t in sorted(sig.items()) if v % 2 == 0]

    def emit(kind: str, payload: dict) -> None:
        if observer is not None:
            observer(kind, payload)

    def sweep() -> None:
        if check:
            bad = check_invariants(state)
            if bad:
                raise SolverInvariantError("; ".join(bad))

    def absorb(player: int, fresh: set[int], witness: Strategy) -> None:
        delta = winning_update(state, player, fresh, witness)
        if delta:
            emit(
                "winning",
                {
                    "player": player,
                    "nodes": raw_nodes(delta),
                    "strategy": raw_pairs(
                        {v: t for v, t in state.witness[player].items() if v in delta}
                    ),
                },
            )
        sweep()

    def stabilize() -> None:
        while True:
            quiet = True
            for player in (0, 1):
                if not state.data[player].dirty:
                    continue
                before = dict(state.data[player].valuation)
                won_now, tau = evaluate_local(state, player)
                moved = {
                    v: theta
                    for v, theta in state.data[player].valuation.items()
                    if v not in before or not val_equal(before[v], theta)
                }
                emit(
                    "evaluate",
                    {
                        "player": player,
                        "changed": [
                            [v // 2, "inf" if t is INFINITY else raw_nodes(t)]
                            for v, t in sorted(moved.items())
                            if v % 2 == 0
                        ],
                    },
                )
                sweep()
                if won_now:
                    absorb(player, won_now, tau)
                    quiet = False
            if quiet:
                return

    while True:
        if state.start in state.won[0]:
            winner = 0
            break
        if state.start in state.won[1]:
            winner = 1
            break
        q = state.current
        d = state.data[q]
        if not d.frontier and not d.improvable:
            # Player q can neither grow nor improve: all of U_q is lost.
            winner = opponent(q)
            award = set(d.explored)
            tau = _counter_in_subgraph(state, q)
            emit(
                "dead-end",
                {
                    "player": q,
                    "winner": winner,
                    "nodes": raw_nodes(award),
                    "strategy": raw_pairs(tau),
                },
            )
            state.won[winner].update(award)
            state.witness[winner].update(tau)
            break
        if not d.improvable:
            picked = list(dict.fromkeys(expansion.pick(state, q)))
            if not picked or any(v not in d.frontier for v in picked):
                raise PolicyContractError(
                    "expansion policy must pick a non-empty frontier subset"
                )
            before = (set(state.won[0]), set(state.won[1]))
            expand(state, norm, q, picked)
            emit("expand", {"player": q, "nodes": raw_nodes(picked)})
            for player in (0, 1):
                delta = state.won[player] - before[player]
                if delta:
                    emit(
                        "winning",
                        {
                            "player": player,
                            "nodes": raw_nodes(delta),
                            "strategy": raw_pairs(
                                {
                                    v: t
                                    for v, t in state.witness[player].items()
                                    if v in delta
                                }
                            ),
                        },
                    )
            sweep()
        else:
            pairs = list(improvement.pick(state, q))
            if not pairs:
                raise PolicyContractError("improvement policy returned no switches")
            for v, u in pairs:
                if (
                    v not in d.explored
                    or u not in d.explored
                    or state.cache[v][0] != q
                    or u not in state.cache[v][2]
                    or not _is_local_improvement(state, q, v, u)
                ):
                    raise PolicyContractError(f"switch {v} -> {u} is not improving")
            for v, u in sorted(pairs):
                d.strategy[v] = u
                d.dirty[v] = None
            state.stats.improvements += len(pairs)
            emit("improve", {"player": q, "switches": raw_pairs(dict(pairs))})
            state.current = opponent(q)
            sweep()
        stabilize()

    state.stats.visited = counting.visited
    regions = (raw_set(state.won[0]), raw_set(state.won[1]))
    strategies = (
        {v // 2: norm.raw(t) for v, t in state.witness[0].items() if v % 2 == 0},
        {v // 2: norm.raw(t) for v, t in state.witness[1].items() if v % 2 == 0},
    )
    return LocalSolution(
        winner=winner,
        start=start,
        regions=regions,
        strategies=strategies,
        stats=state.stats,
    )


def raw_set(nodes) -> set[int]:
    """Source ids behind a set of normalized ids; relays are dropped."""
    return {n // 2 for n in nodes if n % 2 == 0}
