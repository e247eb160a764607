"""Pushdown automata with an observable stack.

Stack words are tuples written top-first, so ``("red", "bot")`` has ``red``
on top.  All objects are immutable; every operation is a pure function.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import ValidationError

Word = tuple


@dataclass(frozen=True)
class Rule:
    src: str
    letter: str
    pop: str
    dst: str
    push: Word = ()

    def __str__(self):
        push = " ".join(self.push) or "eps"
        return f"({self.src}, {self.letter}, {self.pop}) -> ({self.dst}, {push})"


@dataclass(frozen=True)
class PseudoConfig:
    """Observer knowledge: the set of possible states and the visible stack."""

    states: frozenset
    stack: Word

    def __post_init__(self):
        if not isinstance(self.states, frozenset):
            object.__setattr__(self, "states", frozenset(self.states))
        if not isinstance(self.stack, tuple):
            object.__setattr__(self, "stack", tuple(self.stack))
        if not self.states:
            raise ValidationError("pseudo-configuration with an empty state set")
        if not self.stack:
            raise ValidationError("pseudo-configuration with an empty stack")


@dataclass(frozen=True)
class ObsClass:
    push: Word
    targets: frozenset
    members: tuple


@dataclass(frozen=True)
class Pda:
    states: tuple
    inputs: tuple
    stack_syms: tuple
    bottom: str
    rules: tuple = field(default=())

    def __post_init__(self):
        for name in ("states", "inputs", "stack_syms"):
            values = tuple(getattr(self, name))
            if len(set(values)) != len(values):
                raise ValidationError(f"duplicate entries in {name}")
            object.__setattr__(self, name, values)
        if self.bottom not in self.stack_syms:
            raise ValidationError(f"bottom symbol {self.bottom!r} is not a stack letter")
        rules = tuple(sorted(set(self.rules), key=self._rule_key))
        object.__setattr__(self, "rules", rules)
        for rule in rules:
            self._validate_rule(rule)

    def _validate_rule(self, rule):
        if rule.src not in self.state_index or rule.dst not in self.state_index:
            raise ValidationError(f"unknown state in rule {rule}")
        if rule.letter not in self.input_index:
            raise ValidationError(f"unknown input letter in rule {rule}")
        for sym in (rule.pop, *rule.push):
            if sym not in self.stack_index:
                raise ValidationError(f"unknown stack letter {sym!r} in rule {rule}")
        check_push(rule.pop, rule.push, self.bottom, what=f"rule {rule}")

    @cached_property
    def state_index(self):
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def input_index(self):
        return {a: i for i, a in enumerate(self.inputs)}

    @cached_property
    def stack_index(self):
        return {A: i for i, A in enumerate(self.stack_syms)}

    @cached_property
    def table(self):
        """(src, letter, pop) -> tuple of rules, in canonical order."""
        out = {}
        for rule in self.rules:
            out.setdefault((rule.src, rule.letter, rule.pop), []).append(rule)
        return {key: tuple(value) for key, value in out.items()}

    def _rule_key(self, rule):
        si, ii, ki = self.state_index, self.input_index, self.stack_index
        return (
            si.get(rule.src, -1), ii.get(rule.letter, -1), ki.get(rule.pop, -1),
            self.word_key(rule.push), si.get(rule.dst, -1),
        )

    def word_key(self, word):
        """Sort key for stack words: lexicographic by declaration order."""
        index = self.stack_index
        return tuple(index.get(A, -1) for A in word)

    def sorted_states(self, states):
        index = self.state_index
        return sorted(states, key=lambda q: index.get(q, len(index)))

    def check_stack(self, stack, what="stack"):
        if not stack:
            raise ValidationError(f"{what} is empty")
        for A in stack:
            if A not in self.stack_index:
                raise ValidationError(f"{what} uses unknown stack letter {A!r}")
        if stack[-1] != self.bottom or stack.count(self.bottom) != 1:
            raise ValidationError(
                f"{what} must end with {self.bottom!r} and contain it exactly once"
            )

    def check_pseudo_config(self, pc):
        for q in pc.states:
            if q not in self.state_index:
                raise ValidationError(f"unknown state {q!r} in pseudo-configuration")
        self.check_stack(pc.stack)

    def size(self):
        return len(self.states) + len(self.inputs) + len(self.stack_syms) + sum(
            2 + len(r.push) for r in self.rules
        )

    def with_rules(self, rules):
        return Pda(self.states, self.inputs, self.stack_syms, self.bottom, tuple(rules))


def check_push(pop, push, bottom, what="rule"):
    """Enforce the bottom-symbol discipline on a single pop/push pair."""
    if pop == bottom:
        if not push or push[-1] != bottom or push.count(bottom) != 1:
            raise ValidationError(f"{what} pops {bottom!r} but does not push it back at the bottom")
    elif bottom in push:
        raise ValidationError(f"{what} pushes {bottom!r} without popping it")


def complete(pda: Pda) -> Pda:
    """Add the default self-loop (q, a, A) -> (q, A) wherever no rule exists."""
    table = pda.table
    extra = [
        Rule(q, a, A, q, (A,))
        for q in pda.states
        for a in pda.inputs
        for A in pda.stack_syms
        if (q, a, A) not in table
    ]
    if not extra:
        return pda
    return pda.with_rules(pda.rules + tuple(extra))


def is_complete(pda: Pda) -> bool:
    return len(pda.table) == len(pda.states) * len(pda.inputs) * len(pda.stack_syms)


def is_deterministic(pda: Pda) -> bool:
    if not is_complete(pda):
        return False
    return all(len(rules) == 1 for rules in pda.table.values())


def transitions_from(pda: Pda, states: Iterable, letter: str, top: str) -> tuple:
    table = pda.table
    out = []
    for q in pda.sorted_states(states):
        out.extend(table.get((q, letter, top), ()))
    return tuple(out)


def obs_classes(pda: Pda, states: Iterable, letter: str, top: str) -> list:
    """Group the enabled transitions by the word they push.

    Classes come back sorted by push word, stack letters compared by their
    declaration order.
    """
    groups = {}
    for rule in transitions_from(pda, states, letter, top):
        groups.setdefault(rule.push, []).append(rule)
    out = []
    for push in sorted(groups, key=pda.word_key):
        members = tuple(groups[push])
        out.append(ObsClass(push, frozenset(r.dst for r in members), members))
    return out


def succ(pda: Pda, pc: PseudoConfig, letter: str) -> list:
    top, rest = pc.stack[0], pc.stack[1:]
    return [
        PseudoConfig(cls.targets, cls.push + rest)
        for cls in obs_classes(pda, pc.states, letter, top)
    ]
