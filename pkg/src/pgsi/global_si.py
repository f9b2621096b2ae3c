"""Global strategy iteration from the empty strategy.

The solver evaluates the current partial strategy, asks a policy for an
improved one, and stops once no node is improvable; INFINITY-valued nodes
then form the solved player's winning region. Games are normalized to
alternating moves internally (relay nodes on same-owner edges) because the
valuation calculus reads a cycle without the solved player's consent as a
win for that player; results are projected back to input nodes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import PolicyContractError, SolverInvariantError
from .game import ParityGame, Strategy, make_turn_based, opponent, validate_strategy
from .valuation import (
    INFINITY,
    Valuation,
    _propagation_fuel,
    add_node,
    counter_strategy,
    evaluate_strategy,
    improvable_nodes,
    is_improvement_edge,
    propagate,
    reward_key,
    val_equal,
    val_leq,
    val_less,
)


class AllMaxPolicy:
    """Switch every improvable node to its best strictly improving successor.

    Best means the maximal prospective value; value ties go to the target
    with the smallest reward key, which embeds the node id, so the outcome
    is deterministic.
    """

    def improve(
        self,
        game: ParityGame,
        q: int,
        sigma: Strategy,
        xi: dict[int, Valuation],
        improvable: set[int],
    ) -> Strategy:
        new = dict(sigma)
        for v in sorted(improvable):
            best_u = None
            best_val: Valuation = frozenset()
            for u in dict.fromkeys(game.succ[v]):
                if not is_improvement_edge(game, q, sigma, xi, v, u):
                    continue
                cand = add_node(xi[u], v)
                if best_u is None or (
                    not val_equal(cand, best_val) and val_less(game, q, best_val, cand)
                ):
                    best_u, best_val = u, cand
                elif val_equal(cand, best_val) and reward_key(game, q, u) < reward_key(
                    game, q, best_u
                ):
                    best_u = u
            if best_u is not None:
                new[v] = best_u
        return new


class SingleSwitchPolicy:
    """Switch one random improvable node to one random improving successor."""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def improve(
        self,
        game: ParityGame,
        q: int,
        sigma: Strategy,
        xi: dict[int, Valuation],
        improvable: set[int],
    ) -> Strategy:
        new = dict(sigma)
        if not improvable:
            return new
        v = self.rng.choice(sorted(improvable))
        options = [
            u
            for u in dict.fromkeys(game.succ[v])
            if is_improvement_edge(game, q, sigma, xi, v, u)
        ]
        new[v] = self.rng.choice(options)
        return new


def all_max_policy() -> AllMaxPolicy:
    return AllMaxPolicy()


def single_switch_policy(seed: int = 0) -> SingleSwitchPolicy:
    return SingleSwitchPolicy(seed)


@dataclass
class GlobalSolution:
    """Outcome of solve_global, projected onto the input game's nodes."""

    player: int
    regions: tuple[set[int], set[int]]
    strategy: Strategy
    counter: Strategy
    iterations: int
    valuations: list[dict[int, Valuation]] | None = None


def _check_policy_step(
    game: ParityGame,
    q: int,
    sigma: Strategy,
    xi: dict[int, Valuation],
    improvable: set[int],
    proposed: Strategy,
) -> set[int]:
    """Enforce the policy contract; returns the set of switched nodes."""
    problems = validate_strategy(game, q, proposed)
    if problems:
        raise PolicyContractError("; ".join(problems))
    dropped = [v for v in sigma if v not in proposed]
    if dropped:
        raise PolicyContractError(f"policy dropped strategy entries for {sorted(dropped)}")
    switched = {v for v, t in proposed.items() if sigma.get(v) != t}
    strict = False
    for v, t in proposed.items():
        base: Valuation = xi[sigma[v]] if v in sigma else frozenset()
        target = xi[t]
        if val_equal(base, target):
            continue
        if not val_less(game, q, base, target):
            raise PolicyContractError(f"switch at node {v} leaves the improvement arena")
        if v in switched:
            strict = True
    if improvable and not strict:
        raise PolicyContractError("no strict improvement despite improvable nodes")
    return switched


def _snapshot(xi: dict[int, Valuation]) -> frozenset:
    return frozenset(xi.items())


def _project_valuation(xi: dict[int, Valuation], raw_n: int) -> dict[int, Valuation]:
    out: dict[int, Valuation] = {}
    for v in range(raw_n):
        theta = xi[v]
        out[v] = theta if theta is INFINITY else frozenset(x for x in theta if x < raw_n)
    return out


def _project_strategy(sigma: Strategy, origin: list[int], raw_n: int) -> Strategy:
    return {v: origin[t] for v, t in sigma.items() if v < raw_n}


def encode_valuation(theta: Valuation):
    """JSON-friendly rendering: "inf" or a sorted node list."""
    return "inf" if theta is INFINITY else sorted(theta)


def _valuation_diff(old, new) -> list:
    out = []
    for v in sorted(new):
        if old is None or old[v] != new[v]:
            out.append([v, encode_valuation(new[v])])
    return out


def solve_global(
    game: ParityGame,
    q: int,
    policy,
    record_valuations: bool = False,
    observer=None,
) -> GlobalSolution:
    """Solve the whole game for player q by iterated strategy improvement.

    Starts from the empty strategy, re-evaluates by change propagation from
    the switched nodes only, and checks per step that the policy stayed
    within its contract, that the valuation never decreased anywhere, and
    that no valuation repeats. Returns winning regions for both players,
    the final strategy for q, and the counter-strategy for the opponent.
    """
    if q not in (0, 1):
        raise ValueError(f"player must be 0 or 1, got {q!r}")
    tb, origin = make_turn_based(game)
    raw_n = game.n
    preds = tb.predecessors()
    edges = sum(len(s) for s in tb.succ)
    fuel = _propagation_fuel(tb.n, edges)

    sigma: Strategy = {}
    xi = evaluate_strategy(tb, q, sigma)
    seen = {_snapshot(xi)}
    trace = [_project_valuation(xi, raw_n)] if record_valuations else None
    shown = None
    if observer is not None:
        shown = _project_valuation(xi, raw_n)
        observer("evaluate", {"player": q, "changed": _valuation_diff(None, shown)})
    iterations = 0
    while True:
        improvable = improvable_nodes(tb, q, sigma, xi)
        if not improvable:
            break
        proposed = policy.improve(tb, q, sigma, xi, improvable)
        switched = _check_policy_step(tb, q, sigma, xi, improvable, proposed)
        iterations += 1
        if observer is not None:
            raw_switches = [[v, origin[proposed[v]]] for v in sorted(switched) if v < raw_n]
            observer("improve", {"player": q, "switches": raw_switches})
        old = dict(xi)
        propagate(
            q,
            xi,
            proposed,
            switched,
            owner_of=tb.owner.__getitem__,
            priority_of=tb.priority.__getitem__,
            succs_of=tb.succ.__getitem__,
            preds_of=preds.__getitem__,
            fuel=fuel,
        )
        for v in range(tb.n):
            if not val_leq(tb, q, old[v], xi[v]):
                raise SolverInvariantError(f"valuation decreased at node {v}")
        snap = _snapshot(xi)
        if snap in seen:
            raise SolverInvariantError("valuation repeated during improvement")
        seen.add(snap)
        sigma = proposed
        if trace is not None:
            trace.append(_project_valuation(xi, raw_n))
        if observer is not None:
            fresh = _project_valuation(xi, raw_n)
            observer("evaluate", {"player": q, "changed": _valuation_diff(shown, fresh)})
            shown = fresh

    won = {v for v in range(raw_n) if xi[v] is INFINITY}
    regions = (won, set(range(raw_n)) - won) if q == 0 else (set(range(raw_n)) - won, won)
    tau = counter_strategy(tb, q, xi)
    strategy = _project_strategy(sigma, origin, raw_n)
    counter = _project_strategy(tau, origin, raw_n)
    if observer is not None:
        for player, sig in ((q, strategy), (opponent(q), counter)):
            region = regions[player]
            observer(
                "winning",
                {
                    "player": player,
                    "nodes": sorted(region),
                    "strategy": [[v, sig[v]] for v in sorted(sig) if v in region],
                },
            )
    return GlobalSolution(
        player=q,
        regions=regions,
        strategy=strategy,
        counter=counter,
        iterations=iterations,
        valuations=trace,
    )
