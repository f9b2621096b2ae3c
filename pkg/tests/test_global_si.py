"""Global strategy iteration: frozen runs, policies, contracts, monotonicity."""

import random

import pytest

from conftest import random_game
from pgsi.errors import PolicyContractError
from pgsi.game import ParityGame, make_turn_based, verify_winning_strategy
from pgsi.global_si import GlobalSolution, all_max_policy, single_switch_policy, solve_global
from pgsi.oracle import solve_recursive
from pgsi.valuation import INFINITY, evaluate_strategy, val_equal, val_leq, val_less

# two independent copies of the even 2-cycle, so two separate switches exist
PAIR2 = ParityGame.from_nodes([(0, 2, [1]), (1, 1, [0]), (0, 2, [3]), (1, 1, [2])])


def test_solve_g1_all_max(g1):
    sol = solve_global(g1, 0, all_max_policy())
    assert sol.regions == ({0, 1}, set()), sol
    assert sol.strategy == {0: 1}
    assert sol.counter == {1: 0}
    assert sol.iterations == 1


def test_solve_g3_no_step(g3):
    sol = solve_global(g3, 0, all_max_policy())
    assert sol.regions == (set(), {0}), sol
    assert sol.iterations == 0
    assert sol.strategy == {} and sol.counter == {}


def test_solve_g2_choice(g2):
    sol = solve_global(g2, 0, all_max_policy())
    assert sol.regions == ({0, 1, 2}, set()), sol
    assert sol.strategy[0] == 1


def test_all_max_prefers_infinity(g2):
    xi = {0: frozenset(), 1: frozenset({1}), 2: INFINITY}
    assert all_max_policy().improve(g2, 0, {}, xi, {0}) == {0: 2}


def test_all_max_without_improvable_is_identity(g2):
    xi = {0: INFINITY, 1: INFINITY, 2: INFINITY}
    assert all_max_policy().improve(g2, 0, {0: 1}, xi, set()) == {0: 1}


def test_all_max_tie_breaks_by_reward():
    g = ParityGame.from_nodes([(0, 0, [1, 2]), (1, 2, [0]), (1, 4, [0])])
    xi = {0: frozenset(), 1: frozenset({0}), 2: frozenset({0})}
    for _ in range(2):  # same answer both times
        assert all_max_policy().improve(g, 0, {}, xi, {0}) == {0: 1}


def test_single_switch_takes_the_only_option(g1):
    sol = solve_global(g1, 0, single_switch_policy(seed=5))
    assert sol.regions == ({0, 1}, set())
    assert sol.strategy == {0: 1} and sol.iterations == 1


def test_single_switch_deterministic_per_seed():
    a = solve_global(PAIR2, 0, single_switch_policy(seed=9))
    b = solve_global(PAIR2, 0, single_switch_policy(seed=9))
    assert a == b, (a, b)
    assert a.iterations == 2
    assert a.regions == ({0, 1, 2, 3}, set())


def test_policy_contract_rejects_arena_exit(g2):
    class Bad:
        def improve(self, game, q, sigma, xi, improvable):
            return {0: 2}  # strictly worse target

    with pytest.raises(PolicyContractError, match="leaves the improvement arena"):
        solve_global(g2, 0, Bad())


def test_policy_contract_requires_progress(g1):
    class Lazy:
        def improve(self, game, q, sigma, xi, improvable):
            return dict(sigma)

    with pytest.raises(PolicyContractError, match="no strict improvement"):
        solve_global(g1, 0, Lazy())


def test_policy_contract_rejects_dropped_entries():
    class Forgetful:
        def __init__(self):
            self.calls = 0

        def improve(self, game, q, sigma, xi, improvable):
            self.calls += 1
            if self.calls == 1:
                return {0: 1}
            return {2: 3}  # loses the entry for node 0

    with pytest.raises(PolicyContractError, match="dropped strategy entries"):
        solve_global(PAIR2, 0, Forgetful())


def test_solve_rejects_bad_player(g1):
    with pytest.raises(ValueError):
        solve_global(g1, 2, all_max_policy())


def test_valuation_trace_is_strictly_monotone():
    rng = random.Random(70)
    for trial in range(30):
        tb, _ = make_turn_based(random_game(rng))
        q = rng.randint(0, 1)
        sol = solve_global(tb, q, all_max_policy(), record_valuations=True)
        trace = sol.valuations
        assert len(trace) == sol.iterations + 1
        for old, new in zip(trace, trace[1:]):
            strict = 0
            for v in tb.nodes():
                assert val_leq(tb, q, old[v], new[v]), (trial, v)
                if not val_equal(old[v], new[v]):
                    assert val_less(tb, q, old[v], new[v])
                    strict += 1
            assert strict > 0, (trial, old, new)
        # the last recorded valuation is the full evaluation of the final strategy
        final = evaluate_strategy(tb, q, sol.strategy)
        for v in tb.nodes():
            assert val_equal(trace[-1][v], final[v]), (trial, v)


def test_partition_matches_oracle_and_strategies_verify():
    rng = random.Random(71)
    for trial in range(40):
        g = random_game(rng)
        want = solve_recursive(g).regions
        for q in (0, 1):
            sol = solve_global(g, q, all_max_policy())
            assert sol.regions == want, (trial, q, g)
            chk = verify_winning_strategy(g, q, sol.regions[q], sol.strategy)
            assert chk.ok, (trial, q, chk.reason)
            chk = verify_winning_strategy(g, 1 - q, sol.regions[1 - q], sol.counter)
            assert chk.ok, (trial, q, chk.reason)


def test_player_symmetry():
    rng = random.Random(72)
    for _ in range(25):
        g = random_game(rng)
        assert solve_global(g, 0, all_max_policy()).regions == (
            solve_global(g, 1, all_max_policy()).regions
        )


def test_solution_dataclass_shape(g1):
    sol = solve_global(g1, 0, all_max_policy())
    assert isinstance(sol, GlobalSolution)
    assert sol.player == 0
    assert sol.valuations is None  # only recorded on request
