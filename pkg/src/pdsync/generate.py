"""Seeded random instances for property tests and the CLI."""
from __future__ import annotations

import random

from .aeps import Aeps, AepsRule, Branch
from .aps import Aps, ApsRule, Nps, NpsRule
from .pda import Pda, Rule, complete


def _push(rng, pop, syms, bottom, max_len):
    """Random push word respecting the bottom discipline."""
    plain = [A for A in syms if A != bottom]
    n = rng.randint(0, max_len)
    word = tuple(rng.choice(plain) for _ in range(n)) if plain else ()
    if pop == bottom:
        word = word[: max_len] + (bottom,)
    return word


def _names(prefix, n):
    return tuple(f"{prefix}{i}" for i in range(n))


def random_pda(rng: random.Random, n_states=3, n_inputs=2, n_stack=2, deterministic=True,
               max_push=2, density=0.7, branching=2) -> Pda:
    """Random complete PDA; ``n_stack`` counts the bottom symbol."""
    states = _names("q", n_states)
    inputs = _names("a", n_inputs)
    syms = _names("A", n_stack - 1) + ("bot",)
    rules = []
    for q in states:
        for a in inputs:
            for A in syms:
                if rng.random() > density:
                    continue
                count = 1 if deterministic else rng.randint(1, branching)
                for _ in range(count):
                    rules.append(Rule(q, a, A, rng.choice(states),
                                      _push(rng, A, syms, "bot", max_push)))
    return complete(Pda(states, inputs, syms, "bot", tuple(rules)))


def random_nps(rng: random.Random, n_states=3, n_rules=5, n_stack=3, max_push=2) -> Nps:
    states = _names("p", n_states)
    syms = _names("B", n_stack - 1) + ("bot",)
    rules = set()
    for _ in range(n_rules):
        A = rng.choice(syms)
        rules.add(NpsRule(rng.choice(states), A, rng.choice(states),
                          _push(rng, A, syms, "bot", max_push)))
    return Nps(states, syms, "bot", tuple(sorted(rules, key=repr)))


def random_aps(rng: random.Random, n_states=3, n_rules=5, n_stack=2, max_push=2,
               max_branches=3) -> Aps:
    states = _names("p", n_states)
    syms = _names("B", n_stack - 1) + ("bot",)
    rules = set()
    for _ in range(n_rules):
        A = rng.choice(syms)
        k = rng.randint(1, max_branches)
        branches = tuple(
            (rng.choice(states), _push(rng, A, syms, "bot", max_push)) for _ in range(k)
        )
        rules.add(ApsRule(rng.choice(states), A, branches))
    init, fin = rng.choice(states), rng.choice(states)
    return Aps(states, syms, "bot", tuple(sorted(rules, key=repr)), init, fin)


def random_aeps(rng: random.Random, n_states=3, n_vars=2, n_rules=4, n_stack=2, max_push=1,
                max_branches=2) -> Aeps:
    states = _names("q", n_states)
    variables = _names("v", n_vars)
    syms = _names("B", n_stack - 1) + ("bot",)
    rules = []
    for _ in range(n_rules):
        A = rng.choice(syms)
        guard = frozenset(
            (v, rng.randint(0, 1)) for v in variables if rng.random() < 0.3
        )
        branches = []
        for _ in range(rng.randint(1, max_branches)):
            cmd = {v: rng.randint(0, 1) for v in variables if rng.random() < 0.4}
            branches.append(Branch(rng.choice(states), _push(rng, A, syms, "bot", max_push), cmd))
        rules.append(AepsRule(rng.choice(states), A, guard, tuple(branches)))
    return Aeps(states, variables, syms, "bot", tuple(rules), states[0], rng.choice(states))
