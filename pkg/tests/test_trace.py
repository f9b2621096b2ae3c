"""Trace capture, line serialization, replay, and the divergence guard."""

import random

import pytest

from conftest import random_game
from pgsi.errors import SolverInvariantError
from pgsi.game import ExplicitGameSource
from pgsi.local_si import solve_local
from pgsi.trace import TraceEvent, parse_event, replay_events, trace_solve


def test_global_trace_g1(g1):
    events, sol = trace_solve(g1, "global")
    assert [e.kind for e in events] == ["evaluate", "improve", "evaluate", "winning", "winning"]
    assert events[0].payload == {"player": 0, "changed": [[0, [0]], [1, [0, 1]]]}
    assert events[1].payload == {"player": 0, "switches": [[0, 1]]}
    assert events[2].payload == {"player": 0, "changed": [[0, "inf"], [1, "inf"]]}
    assert events[3].payload == {"player": 0, "nodes": [0, 1], "strategy": [[0, 1]]}
    assert events[4].payload == {"player": 1, "nodes": [], "strategy": []}
    assert sol.regions == ({0, 1}, set())


def test_local_trace_g1(g1):
    events, sol = trace_solve(g1, "local")
    assert [e.kind for e in events] == [
        "expand",
        "evaluate",
        "expand",
        "evaluate",
        "improve",
        "evaluate",
        "winning",
    ]
    assert events[0].payload == {"player": 0, "nodes": [0]}
    assert events[3].payload == {"player": 0, "changed": [[1, [0, 1]]]}
    assert events[4].payload == {"player": 0, "switches": [[0, 1]]}
    assert events[6].payload == {"player": 0, "nodes": [0, 1], "strategy": [[0, 1]]}
    assert sol.winner == 0


def test_local_trace_g3_ends_dead_end(g3):
    events, sol = trace_solve(g3, "local")
    assert [e.kind for e in events] == ["expand", "evaluate", "dead-end"]
    assert events[2].payload == {"player": 0, "winner": 1, "nodes": [0], "strategy": []}
    got = replay_events(events)
    assert got["won"] == (set(), {0})
    assert sol.winner == 1


def test_event_lines_round_trip(g1):
    for mode in ("global", "local"):
        events, _sol = trace_solve(g1, mode)
        for ev in events:
            line = ev.to_line()
            assert "\n" not in line
            assert parse_event(line) == ev
    assert parse_event('{"kind": "expand", "nodes": [3], "player": 1}') == TraceEvent(
        "expand", {"nodes": [3], "player": 1}
    )


def test_replay_matches_solver():
    rng = random.Random(95)
    for _trial in range(25):
        g = random_game(rng)
        start = rng.randrange(g.n)
        events, sol = trace_solve(g, "local", start=start)
        got = replay_events(events)
        assert got["won"] == sol.regions
        assert got["witness"] == (sol.strategies[0], sol.strategies[1])

        q = rng.randint(0, 1)
        events, gsol = trace_solve(g, "global", player=q)
        got = replay_events(events)
        assert got["won"] == gsol.regions
        per_player = {q: gsol.strategy, 1 - q: gsol.counter}
        for p in (0, 1):
            want = {v: t for v, t in per_player[p].items() if v in gsol.regions[p]}
            assert got["witness"][p] == want


def test_trace_is_deterministic_and_faithful(g2):
    lines_a = [e.to_line() for e in trace_solve(g2, "local")[0]]
    lines_b = [e.to_line() for e in trace_solve(g2, "local")[0]]
    assert lines_a == lines_b
    _events, sol = trace_solve(g2, "local")
    direct = solve_local(g2, 0)
    assert (sol.winner, sol.regions, sol.strategies, sol.visited) == (
        direct.winner,
        direct.regions,
        direct.strategies,
        direct.visited,
    )


def test_trace_solve_validates_arguments(g1):
    with pytest.raises(ValueError, match="mode"):
        trace_solve(g1, "both")
    with pytest.raises(ValueError, match="explicit game"):
        trace_solve(ExplicitGameSource(g1), "global")


def test_divergence_between_runs_is_caught(g2):
    built = []

    def flaky_expansion():
        built.append(None)
        index = 0 if len(built) == 1 else -1

        class Pick:
            def pick(self, state, q):
                return [list(state.data[q].frontier)[index]]

        return Pick()

    with pytest.raises(SolverInvariantError, match="diverged"):
        trace_solve(g2, "local", expansion_factory=flaky_expansion)
