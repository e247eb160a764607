"""End-to-end acceptance checks.

Each test is one criterion; the session summary prints a PASS/FAIL line per
criterion (see conftest.py).
"""
import itertools
import os
import random
import time

import pytest

from pdsync.aeps import aeps_to_pda, bounded_accepts, normalize_distinct_pushes
from pdsync.aps import Aps, aps_emptiness, build_aps, extract_run, validate_run
from pdsync.cli import main
from pdsync.formats import load_instance
from pdsync.generate import random_aps, random_nps, random_pda
from pdsync.oracle import (
    Bounds, NoWithinBounds, Yes, bounded_aps_run_search, bounded_game_solve, brute_prestar,
    min_leaf_compressed_runs,
)
from pdsync.pda import PseudoConfig, complete, is_deterministic, obs_classes
from pdsync.pipeline import decide
from pdsync.reductions import (
    ADA, GIVEN, HOMING, SPECIAL, SUBSET, SUBSET_HOMING, SUPER, ProblemInstance,
    lower_to_special, pull_back_witness, reduce,
)
from pdsync.sparse import (
    LEAF, det_special_sync, enumerate_structured, is_structured, leaf_automaton, prestar,
    sparse_empty, stores,
)
from pdsync.witness import SuperSynchroniser, check_witness, deserialize_tree

from conftest import CORPUS, fixture_path

BOT = ("bot",)


def test_criterion_1_run4_golden(tmp_path, capsys):
    tree = tmp_path / "run4.tree"
    start = time.perf_counter()
    code = main(["decide", fixture_path("run4.pda"), "--variant", "special",
                 "--witness", str(tree)])
    elapsed = time.perf_counter() - start
    assert "answer: YES" in capsys.readouterr().out
    assert code == 0
    assert elapsed < 5.0
    pda = complete(load_instance(fixture_path("run4.pda")).model)
    witness = deserialize_tree(tree.read_text())
    assert check_witness(pda, PseudoConfig(frozenset("1234"), BOT), SuperSynchroniser("4"),
                         witness)


def test_criterion_2_run4_leaf_counts(run4, q4):
    start = time.perf_counter()
    aps = build_aps(run4, q4, "4")
    ok, run = sparse_empty(aps, 4)
    assert ok and run.leaf_count() == 4 and validate_run(aps, run)
    assert sparse_empty(aps, 3) == (False, None)
    # oracle: the fewest leaves of any accepting run within stack bound 8 is 4
    assert isinstance(bounded_aps_run_search(aps, 3, Bounds(stack_bound=8)), NoWithinBounds)
    assert isinstance(bounded_aps_run_search(aps, 4, Bounds(stack_bound=8)), Yes)
    assert time.perf_counter() - start < 60


def test_criterion_3_deterministic_class_bound():
    violations = checked = 0
    for seed in range(500):
        rng = random.Random(seed)
        pda = random_pda(rng, n_states=rng.randint(1, 5), n_inputs=rng.randint(1, 3),
                         n_stack=rng.randint(1, 3), max_push=rng.randint(0, 3))
        assert is_deterministic(pda)
        for size in range(1, len(pda.states) + 1):
            for S in itertools.combinations(pda.states, size):
                for a in pda.inputs:
                    for A in pda.stack_syms:
                        checked += 1
                        total = sum(len(E.targets) for E in obs_classes(pda, S, a, A))
                        violations += total > len(S)
    assert checked > 0 and violations == 0


def test_criterion_4_prestar_oracle(capsys):
    # Compared configurations have at most 6 stack symbols.  The brute-force
    # search may climb to 16 on the way, since a bound-6 search misses
    # predecessors whose only path goes higher; that literal count is printed.
    start = time.perf_counter()
    literal = disagreements = 0
    for seed in range(200):
        rng = random.Random(seed)
        nps = random_nps(rng, n_states=rng.randint(1, 4), n_rules=rng.randint(1, 6),
                         n_stack=rng.randint(2, 3))
        fin = rng.choice(nps.states)
        aps = Aps(nps.states, nps.stack_syms, nps.bottom, (), nps.states[0], fin)
        m = prestar(nps, leaf_automaton(aps))
        target = [(fin, BOT)]
        narrow = brute_prestar(nps, target, Bounds(stack_bound=6))
        wide = brute_prestar(nps, target, Bounds(stack_bound=16))
        plain = [A for A in nps.stack_syms if A != nps.bottom]
        for q in nps.states:
            for n in range(6):
                for body in itertools.product(plain, repeat=n):
                    config = (q, body + BOT)
                    got = stores(m, config)
                    literal += got != (config in narrow)
                    disagreements += got != (config in wide)
    with capsys.disabled():
        print(f"\n  pre*: {disagreements} disagreements "
              f"({literal} against a search capped at 6 symbols)")
    assert disagreements == 0
    assert time.perf_counter() - start < 60


GADGETS = [
    (SUBSET, ADA), (SUBSET, GIVEN), (GIVEN, SUBSET), (GIVEN, SUBSET_HOMING), (GIVEN, SUPER),
    (SUPER, GIVEN), (SUPER, SPECIAL), (HOMING, GIVEN), (SUBSET_HOMING, HOMING),
]


def test_criterion_5_reduction_corpus():
    assert len(CORPUS) >= 8
    names = {os.path.basename(p) for p in CORPUS}
    assert {"run4.pda", "swap_no.pda", "nondet_yes.pda"} <= names
    failures = []
    for path in CORPUS:
        base = load_instance(path).instance("super")
        for src_variant, to in GADGETS:
            src = ProblemInstance(base.pda, src_variant, base.initial, base.target, base.stack)
            red = reduce(src, to)
            a = decide(src, solver="saturation")
            b = decide(red.instance, solver="saturation")
            if a.answer != b.answer:
                failures.append((path, red.tag, "answer"))
                continue
            if b.answer:
                tree, target = pull_back_witness(red, b.witness, b.target)
                kind = src.witness_kind(target)
                if not check_witness(complete(src.pda), src.root, kind, tree):
                    failures.append((path, red.tag, "witness"))
    assert failures == []


def test_criterion_6_compression():
    disagreements = []
    for seed in range(100):
        rng = random.Random(seed)
        aps = random_aps(rng, n_states=rng.randint(1, 4), n_rules=rng.randint(1, 7))
        bounds = Bounds(stack_bound=5)
        root = (aps.init, (aps.bottom,))
        compressed = min_leaf_compressed_runs(aps, root, bounds).get(root, float("inf"))
        for k in (1, 2, 3):
            plain = isinstance(bounded_aps_run_search(aps, k, bounds), Yes)
            if plain != (compressed <= k):
                disagreements.append((seed, k))
    assert disagreements == []


def test_criterion_7_solver_agreement():
    checked = 0
    for path in CORPUS:
        base = load_instance(path).instance("super")
        if not is_deterministic(complete(base.pda)):
            continue
        special, _ = lower_to_special(base)
        pda = complete(special.pda)
        I, s = special.initial, special.target
        sparse_ok, tree = _sparse_checked(pda, I, s)
        aps = build_aps(pda, I, s)
        sat_ok, prov = aps_emptiness(aps)
        if sat_ok:
            assert validate_run(aps, extract_run(aps, prov))
        game = bounded_game_solve(pda, special.root, SuperSynchroniser(s), Bounds(stack_bound=8))
        assert sparse_ok == sat_ok == isinstance(game, Yes), path
        checked += 1
    assert checked >= 6


def _sparse_checked(pda, I, s):
    ok, tree = det_special_sync(pda, I, s)
    if ok:
        assert check_witness(pda, PseudoConfig(I, BOT), SuperSynchroniser(s), tree)
    return ok, tree


def test_criterion_8_aeps_reduction():
    start = time.perf_counter()

    def reduced(name):
        aeps = normalize_distinct_pushes(load_instance(fixture_path(name)).model)
        red = aeps_to_pda(aeps)
        inst = ProblemInstance(red.pda, SUPER, red.root.states, red.target, red.root.stack)
        return aeps, red, inst

    aeps, red, inst = reduced("neps.aeps")
    assert is_deterministic(red.pda)
    assert decide(inst).answer == bounded_accepts(aeps) is True

    for name, expected in (("sat2.aeps", True), ("contradiction.aeps", False)):
        aeps, red, inst = reduced(name)
        d = decide(inst)
        assert d.answer is expected
        assert bounded_accepts(aeps) is expected
        game = bounded_game_solve(red.pda, red.root, SuperSynchroniser(red.target),
                                  Bounds(stack_bound=6))
        assert isinstance(game, Yes) is expected
    assert time.perf_counter() - start < 30


def _grammar_trees(k):
    """Trees from the grammar T -> leaf | simple(C) | C, C -> leaf | complex(T, T, ...)."""
    def complex_rooted(n):
        if n == 1:
            yield LEAF
            return
        for parts in range(2, n + 1):
            for sizes in _splits(n, parts):
                for kids in itertools.product(*(list(any_tree(m)) for m in sizes)):
                    yield ("complex", kids)

    def any_tree(n):
        for c in complex_rooted(n):
            yield c
            yield ("simple", c)

    return [t for n in range(1, k + 1) for t in any_tree(n)]


def _splits(n, parts):
    if parts == 1:
        yield (n,)
        return
    for first in range(1, n - parts + 2):
        for rest in _splits(n - first, parts - 1):
            yield (first,) + rest


@pytest.mark.parametrize("k,count", [(1, 2), (2, 10)])
def test_criterion_9_enumeration_counts(k, count):
    trees = list(enumerate_structured(k))
    assert len(trees) == count
    assert sorted(map(repr, trees)) == sorted(map(repr, _grammar_trees(k)))
    for tree in trees:
        assert is_structured(tree)
        stack = [tree]
        while stack:
            node = stack.pop()
            if node[0] == "simple":
                assert node[1][0] != "simple"
                stack.append(node[1])
            elif node[0] == "complex":
                stack.extend(node[1])
