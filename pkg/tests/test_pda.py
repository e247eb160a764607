import random

import pytest
from hypothesis import given, settings, strategies as st

from pdsync.errors import ValidationError
from pdsync.generate import random_pda
from pdsync.pda import (
    Pda, PseudoConfig, Rule, complete, is_complete, is_deterministic, obs_classes, succ,
    transitions_from,
)


def test_run4_has_twenty_drawn_rules(run4_doc):
    assert len(run4_doc.model.rules) == 20


def test_completion_adds_dia_bottom_self_loops(run4_doc):
    pda = run4_doc.model
    done = complete(pda)
    added = set(done.rules) - set(pda.rules)
    assert added == {Rule(q, "dia", "bot", q, ("bot",)) for q in "1234"}


def test_completion_is_idempotent(run4):
    assert complete(run4) == run4
    assert is_complete(run4)


def test_completion_of_empty_pda_adds_one_loop():
    pda = complete(Pda(("q",), ("a",), ("bot",), "bot", ()))
    assert pda.rules == (Rule("q", "a", "bot", "q", ("bot",)),)
    assert is_deterministic(pda)


def test_run4_is_deterministic(run4):
    assert is_deterministic(run4)


def test_extra_rule_breaks_determinism(run4):
    extra = run4.with_rules(run4.rules + (Rule("1", "box", "bot", "3", ("blue", "bot")),))
    assert not is_deterministic(extra)


def test_bottom_must_be_pushed_back():
    with pytest.raises(ValidationError):
        Pda(("q",), ("a",), ("A", "bot"), "bot", (Rule("q", "a", "bot", "q", ("A",)),))


def test_bottom_only_at_the_end():
    with pytest.raises(ValidationError):
        Pda(("q",), ("a",), ("A", "bot"), "bot", (Rule("q", "a", "A", "q", ("bot", "A")),))


def test_unknown_identifier_rejected():
    with pytest.raises(ValidationError):
        Pda(("q",), ("a",), ("bot",), "bot", (Rule("q", "b", "bot", "q", ("bot",)),))


def test_empty_knowledge_set_rejected():
    with pytest.raises(ValidationError):
        PseudoConfig(frozenset(), ("bot",))


def test_transitions_from_example(run4):
    got = set(transitions_from(run4, {"3", "4"}, "dia", "blue"))
    assert got == {
        Rule("3", "dia", "blue", "4", ("blue", "blue")),
        Rule("4", "dia", "blue", "3", ("red", "blue")),
    }


def test_transitions_from_empty_set(run4):
    assert transitions_from(run4, set(), "box", "bot") == ()


def test_obs_classes_follow_the_next_definition(run4):
    # Targets come from the definition of next(E), not the example's prose.
    classes = obs_classes(run4, {"3", "4"}, "dia", "blue")
    got = {c.push: c.targets for c in classes}
    assert got == {("blue", "blue"): frozenset("4"), ("red", "blue"): frozenset("3")}


def test_obs_classes_box_on_bottom(run4, q4):
    classes = obs_classes(run4, q4, "box", "bot")
    got = {c.push: c.targets for c in classes}
    assert got == {("blue", "bot"): frozenset("34"), ("red", "bot"): frozenset("12")}
    # canonical order follows stack declaration order: red before blue
    assert [c.push for c in classes] == [("red", "bot"), ("blue", "bot")]


def test_singleton_has_one_class(run4):
    for a in run4.inputs:
        for A in run4.stack_syms:
            classes = obs_classes(run4, {"2"}, a, A)
            assert len(classes) == 1 and len(classes[0].members) == 1


def test_succ_from_full_set(run4, q4):
    got = succ(run4, PseudoConfig(q4, ("bot",)), "box")
    assert got == [
        PseudoConfig(frozenset("12"), ("red", "bot")),
        PseudoConfig(frozenset("34"), ("blue", "bot")),
    ]


def test_succ_pop_keeps_knowledge(run4):
    got = succ(run4, PseudoConfig(frozenset("34"), ("blue", "bot")), "box")
    assert got == [PseudoConfig(frozenset("34"), ("bot",))]


def test_succ_self_loop():
    pda = complete(Pda(("q",), ("a",), ("bot",), "bot", ()))
    assert succ(pda, PseudoConfig({"q"}, ("bot",)), "a") == [PseudoConfig({"q"}, ("bot",))]


def _subsets(rng, states):
    out = [s for s in states if rng.random() < 0.5]
    return out or [rng.choice(states)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_partition_property(seed, det):
    rng = random.Random(seed)
    pda = random_pda(rng, n_states=rng.randint(1, 4), n_stack=rng.randint(1, 3),
                     deterministic=det)
    S = _subsets(rng, pda.states)
    for a in pda.inputs:
        for A in pda.stack_syms:
            classes = obs_classes(pda, S, a, A)
            members = [r for c in classes for r in c.members]
            assert len(members) == len(set(members))
            assert set(members) == set(transitions_from(pda, S, a, A))
            assert len({c.push for c in classes}) == len(classes)
            for c in classes:
                assert c.targets == frozenset(r.dst for r in c.members)
                assert all(r.push == c.push for r in c.members)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_deterministic_class_bound(seed):
    rng = random.Random(seed)
    pda = random_pda(rng, n_states=rng.randint(1, 5), n_stack=rng.randint(1, 3))
    S = _subsets(rng, pda.states)
    for a in pda.inputs:
        for A in pda.stack_syms:
            assert sum(len(c.targets) for c in obs_classes(pda, S, a, A)) <= len(S)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_succ_keeps_bottom_discipline_and_is_pure(seed):
    rng = random.Random(seed)
    pda = random_pda(rng, n_states=3, n_stack=3, deterministic=False)
    pc = PseudoConfig(frozenset(pda.states), ("A0", "A1", "bot"))
    for a in pda.inputs:
        out = succ(pda, pc, a)
        assert out == succ(pda, pc, a)
        for child in out:
            pda.check_pseudo_config(child)
