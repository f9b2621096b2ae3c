"""Replayable solver traces for teaching and debugging.

Solvers accept an observer callback; this module turns its (kind, payload)
calls into TraceEvent records, one JSON object per line when serialized.
Payload snapshots are diffs against the previous state, so a trace grows
with the work done rather than with the game. Replaying the winning and
dead-end events over an empty state reconstructs the final decided regions.

Event kinds and payload fields (all node ids are source ids):
  evaluate  player, changed: [[node, value], ...] with value "inf" or a list
  improve   player, switches: [[node, target], ...]
  expand    player, nodes: [node, ...]
  winning   player, nodes, strategy: [[node, target], ...]
  dead-end  player (the stuck one), winner, nodes, strategy
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import SolverInvariantError
from .game import ParityGame
from .global_si import all_max_policy, solve_global
from .local_si import local_all_max_policy, random_expansion_policy, solve_local


@dataclass
class TraceEvent:
    kind: str
    payload: dict

    def to_line(self) -> str:
        return json.dumps({"kind": self.kind, **self.payload}, sort_keys=True)


def parse_event(line: str) -> TraceEvent:
    data = json.loads(line)
    kind = data.pop("kind")
    return TraceEvent(kind, data)


def replay_events(events) -> dict:
    """Fold a trace into the final decided regions and witness strategies."""
    won: tuple[set[int], set[int]] = (set(), set())
    witness: tuple[dict[int, int], dict[int, int]] = ({}, {})
    for event in events:
        if event.kind == "winning":
            player = event.payload["player"]
        elif event.kind == "dead-end":
            player = event.payload["winner"]
        else:
            continue
        won[player].update(event.payload["nodes"])
        witness[player].update({v: t for v, t in event.payload["strategy"]})
    return {"won": won, "witness": witness}


def _same_global(a, b) -> bool:
    return (
        a.regions == b.regions
        and a.strategy == b.strategy
        and a.counter == b.counter
        and a.iterations == b.iterations
    )


def _same_local(a, b) -> bool:
    return (
        a.winner == b.winner
        and a.regions == b.regions
        and a.strategies == b.strategies
        and a.visited == b.visited
    )


def trace_solve(
    game,
    mode: str = "local",
    *,
    player: int = 0,
    start: int = 0,
    policy_factory=None,
    expansion_factory=None,
    first_player: int = 0,
    check: bool = False,
) -> tuple[list[TraceEvent], object]:
    """Run a solve twice, once traced, and return (events, traced solution).

    The untraced run guards the contract that observation never changes the
    outcome; a mismatch raises SolverInvariantError. Policies are built
    fresh per run through the factories so seeded randomness lines up.
    """
    events: list[TraceEvent] = []

    def observer(kind: str, payload: dict) -> None:
        events.append(TraceEvent(kind, payload))

    if mode == "global":
        if not isinstance(game, ParityGame):
            raise ValueError("global tracing needs an explicit game")
        factory = policy_factory if policy_factory is not None else all_max_policy
        plain = solve_global(game, player, factory())
        traced = solve_global(game, player, factory(), observer=observer)
        if not _same_global(plain, traced):
            raise SolverInvariantError("traced global solve diverged")
        return events, traced
    if mode == "local":
        imp = policy_factory if policy_factory is not None else local_all_max_policy
        exp = (
            expansion_factory
            if expansion_factory is not None
            else lambda: random_expansion_policy(0)
        )
        plain = solve_local(
            game, start, imp(), exp(), first_player=first_player, check=check
        )
        traced = solve_local(
            game,
            start,
            imp(),
            exp(),
            first_player=first_player,
            check=check,
            observer=observer,
        )
        if not _same_local(plain, traced):
            raise SolverInvariantError("traced local solve diverged")
        return events, traced
    raise ValueError(f"mode must be 'global' or 'local', got {mode!r}")
