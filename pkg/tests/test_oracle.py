import random

import pytest

from pdsync.aps import Aps, ApsRule, Nps, NpsRule
from pdsync.errors import BudgetExceeded, ValidationError
from pdsync.generate import random_pda
from pdsync.oracle import (
    Bounds, NoWithinBounds, Yes, bounded_aps_run_search, bounded_game_solve, brute_prestar,
    min_leaf_compressed_runs, min_leaf_runs, nps_path, oracle_decide_exists, shape_configs,
)
from pdsync.pda import PseudoConfig
from pdsync.pipeline import oracle_decide
from pdsync.reductions import ProblemInstance
from pdsync.sparse import LEAF, complex_, simple
from pdsync.witness import HomingWord, SuperSynchroniser, Synchroniser, check_witness

BOT = ("bot",)


def test_bounds_must_be_positive():
    with pytest.raises(ValidationError):
        Bounds(stack_bound=0)


def test_no_within_bounds_is_falsy():
    assert not NoWithinBounds(3)


# Shallowest strategies on RUN4 from the full state set, counted in nodes
# along the longest branch; frozen from this solver.
@pytest.mark.parametrize("kind,depth", [
    (Synchroniser("1"), 6), (Synchroniser("2"), 6), (Synchroniser("3"), 6),
    (Synchroniser("4"), 6), (SuperSynchroniser("4"), 9), (HomingWord(), 3),
])
def test_run4_shallowest_strategies(run4, q4, kind, depth):
    root = PseudoConfig(q4, BOT)
    res = bounded_game_solve(run4, root, kind)
    assert isinstance(res, Yes)
    assert check_witness(run4, root, kind, res.witness)
    assert res.witness.depth() == depth
    shallow = bounded_game_solve(run4, root, kind, Bounds(depth_bound=depth - 2))
    assert isinstance(shallow, NoWithinBounds)


@pytest.mark.parametrize("s", "1234")
def test_run4_super_for_every_target(run4, q4, s):
    assert isinstance(bounded_game_solve(run4, PseudoConfig(q4, BOT), SuperSynchroniser(s)), Yes)


def test_game_budget(run4, q4):
    with pytest.raises(BudgetExceeded):
        bounded_game_solve(run4, PseudoConfig(q4, BOT), SuperSynchroniser("4"),
                           Bounds(node_budget=3))


def test_oracle_decide_exists(run4, q4):
    s, witness = oracle_decide_exists(run4, PseudoConfig(q4, BOT), Bounds(), super_=True)
    assert s == "1" and witness is not None


def test_oracle_decide_subset_reports_target(run4, q4):
    res, target = oracle_decide(ProblemInstance(run4, "subset", q4))
    assert isinstance(res, Yes) and target == "1"


def test_game_is_deterministic():
    pda = random_pda(random.Random(4), n_states=3, deterministic=False)
    root = PseudoConfig(frozenset(pda.states), BOT)
    a = bounded_game_solve(pda, root, HomingWord(), Bounds(stack_bound=4))
    b = bounded_game_solve(pda, root, HomingWord(), Bounds(stack_bound=4))
    assert a == b


# -- APS runs -----------------------------------------------------------------

FORK = Aps(("i", "f"), ("A", "bot"), "bot", (
    ApsRule("i", "bot", (("f", BOT), ("i", ("A", "bot")))),
    ApsRule("i", "A", (("f", ()),)),
), "i", "f")


def test_min_leaf_runs_counts_leaves():
    cost, _ = min_leaf_runs(FORK, ("i", BOT), Bounds())
    assert cost[("f", BOT)] == 1
    assert cost[("i", ("A", "bot"))] == 1
    assert cost[("i", BOT)] == 2


def test_bounded_run_search_respects_leaf_bound():
    assert isinstance(bounded_aps_run_search(FORK, 1), NoWithinBounds)
    res = bounded_aps_run_search(FORK, 2)
    assert isinstance(res, Yes) and res.witness.leaf_count() == 2


def test_compressed_runs_agree_on_fork():
    tree = min_leaf_compressed_runs(FORK, ("i", BOT), Bounds())
    assert tree[("i", BOT)] == 2


def test_shape_configs():
    assert shape_configs(FORK, LEAF, Bounds()) == {("f", BOT)}
    assert ("i", ("A", "bot")) in shape_configs(FORK, simple(LEAF), Bounds())
    assert shape_configs(FORK, complex_(LEAF, simple(LEAF)), Bounds()) == {("i", BOT)}
    assert shape_configs(FORK, complex_(simple(LEAF), LEAF), Bounds()) == set()


# -- NPS reachability -------------------------------------------------------------

CLIMB = Nps(("p", "q"), ("A", "bot"), "bot", (
    NpsRule("p", "bot", "p", ("A", "bot")),
    NpsRule("p", "A", "p", ("A", "A")),
    NpsRule("p", "A", "q", ()),
    NpsRule("q", "A", "q", ()),
))


def test_brute_prestar_is_bounded():
    narrow = brute_prestar(CLIMB, [("q", BOT)], Bounds(stack_bound=2))
    assert ("q", ("A", "bot")) in narrow
    assert ("p", BOT) in narrow
    assert all(len(w) <= 2 for _, w in narrow)


def test_nps_path_finds_shortest():
    path = nps_path(CLIMB, ("p", BOT), [("q", BOT)], Bounds())
    assert [r.dst for r in path] == ["p", "q"]
    assert nps_path(CLIMB, ("q", BOT), [("p", BOT)], Bounds()) is None
