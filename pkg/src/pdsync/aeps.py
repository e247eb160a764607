"""Alternating pushdown systems extended with Boolean variables.

A rule fires when its source state and stack top match and the valuation
passes every test in the guard; each branch then pushes a word and applies
a command.  ``aeps_to_pda`` turns an AEPS into a super-synchronisation
instance that is positive exactly when the AEPS has an accepting run.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .aps import Aps, ApsRule
from .errors import NotEnabled, NotNormalized, ValidationError
from .pda import Pda, PseudoConfig, Rule, check_push, complete


def _as_map(pairs):
    out = {}
    for var, bit in pairs:
        if bit not in (0, 1):
            raise ValidationError(f"bit for {var!r} must be 0 or 1")
        if var in out and out[var] != bit:
            raise ValidationError(f"inconsistent command on {var!r}")
        out[var] = bit
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class Branch:
    dst: str
    push: tuple = ()
    command: tuple = ()  # sorted ((var, bit), ...)

    def __post_init__(self):
        object.__setattr__(self, "push", tuple(self.push))
        cmd = self.command.items() if isinstance(self.command, dict) else self.command
        object.__setattr__(self, "command", _as_map(cmd))


@dataclass(frozen=True)
class AepsRule:
    src: str
    pop: str
    guard: frozenset  # {(var, bit)}; may be contradictory
    branches: tuple

    def __post_init__(self):
        g = self.guard.items() if isinstance(self.guard, dict) else self.guard
        object.__setattr__(self, "guard", frozenset(g))
        if not self.branches:
            raise ValidationError("AEPS rule without branches")
        object.__setattr__(self, "branches", tuple(
            b if isinstance(b, Branch) else Branch(*b) for b in self.branches
        ))


@dataclass(frozen=True)
class Aeps:
    states: tuple
    vars: tuple
    stack_syms: tuple
    bottom: str
    rules: tuple
    init: str
    fin: str

    def __post_init__(self):
        for name in ("states", "vars", "stack_syms", "rules"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        states, variables, syms = set(self.states), set(self.vars), set(self.stack_syms)
        if self.bottom not in syms:
            raise ValidationError("bottom symbol is not a stack letter")
        if self.init not in states or self.fin not in states:
            raise ValidationError("init and fin must be states")
        for rule in self.rules:
            if rule.src not in states or rule.pop not in syms:
                raise ValidationError(f"rule from {rule.src!r} uses unknown identifiers")
            for var, _ in rule.guard:
                if var not in variables:
                    raise ValidationError(f"guard tests unknown variable {var!r}")
            for br in rule.branches:
                if br.dst not in states or any(A not in syms for A in br.push):
                    raise ValidationError(f"rule from {rule.src!r} uses unknown identifiers")
                for var, _ in br.command:
                    if var not in variables:
                        raise ValidationError(f"command sets unknown variable {var!r}")
                check_push(rule.pop, br.push, self.bottom, what=f"rule from {rule.src!r}")

    def zero(self):
        return tuple((v, 0) for v in self.vars)


@dataclass(frozen=True)
class AepsConfig:
    state: str
    stack: tuple
    valuation: tuple  # ((var, bit), ...) in declaration order

    def value(self):
        return dict(self.valuation)


def enabled(rule: AepsRule, config: AepsConfig) -> bool:
    if rule.src != config.state or not config.stack or config.stack[0] != rule.pop:
        return False
    val = config.value()
    return all(val.get(var) == bit for var, bit in rule.guard)


def fork(rule: AepsRule, config: AepsConfig) -> list:
    if not enabled(rule, config):
        raise NotEnabled(f"rule from {rule.src!r} is not enabled at {config}")
    rest = config.stack[1:]
    out = []
    for br in rule.branches:
        cmd = dict(br.command)
        val = tuple((v, cmd.get(v, b)) for v, b in config.valuation)
        out.append(AepsConfig(br.dst, br.push + rest, val))
    return out


def _fresh(used, name):
    while name in used:
        name += "'"
    used.add(name)
    return name


def is_normalized(aeps: Aeps) -> bool:
    return all(
        len({br.push for br in r.branches}) == len(r.branches) for r in aeps.rules
    )


def normalize_distinct_pushes(aeps: Aeps) -> Aeps:
    """Make the push words of every rule pairwise distinct.

    A branch repeating an earlier push word instead pushes a fresh marker on
    top and goes through a fresh state whose only rule pops the marker.
    """
    if is_normalized(aeps):
        return aeps
    states = list(aeps.states)
    syms = [A for A in aeps.stack_syms if A != aeps.bottom]
    used_states, used_syms = set(states), set(aeps.stack_syms)
    rules = []
    extra = []
    for r, rule in enumerate(aeps.rules):
        seen = set()
        branches = []
        for b, br in enumerate(rule.branches):
            if br.push not in seen:
                seen.add(br.push)
                branches.append(br)
                continue
            mark = _fresh(used_syms, f"#t:{r}:{b}")
            mid = _fresh(used_states, f"~t:{r}:{b}")
            syms.append(mark)
            states.append(mid)
            branches.append(Branch(mid, (mark,) + br.push, br.command))
            extra.append(AepsRule(mid, mark, frozenset(), (Branch(br.dst, ()),)))
        rules.append(AepsRule(rule.src, rule.pop, rule.guard, tuple(branches)))
    return Aeps(
        tuple(states), aeps.vars, tuple(syms) + (aeps.bottom,), aeps.bottom,
        tuple(rules + extra), aeps.init, aeps.fin,
    )


@dataclass(frozen=True)
class AepsReduction:
    pda: Pda
    root: PseudoConfig
    target: str
    var_state: dict  # (var, bit) -> PDA state
    rule_letter: tuple  # letter of rule i
    end: str
    reject: str


def aeps_to_pda(aeps: Aeps) -> AepsReduction:
    """PDA and root whose super-synchronisers to ``acc`` mirror accepting runs."""
    if not is_normalized(aeps):
        raise NotNormalized("some rule pushes the same word on two branches")
    used = set(aeps.states)
    var_state = {}
    for v in aeps.vars:
        for b in (0, 1):
            var_state[(v, b)] = _fresh(used, f"{v}={b}")
    acc = _fresh(used, "acc")
    rej = _fresh(used, "rej")
    letters_used = set()
    letters = tuple(_fresh(letters_used, f"in:{i}") for i in range(len(aeps.rules)))
    end = _fresh(letters_used, "end")

    syms = aeps.stack_syms
    rules = []
    for letter, rule in zip(letters, aeps.rules):
        for p in aeps.states:
            for A in syms:
                if p != rule.src or A != rule.pop:
                    rules.append(Rule(p, letter, A, rej, (A,)))
                    continue
                for br in rule.branches:
                    rules.append(Rule(p, letter, A, br.dst, br.push))
        for (v, b), name in var_state.items():
            refuted = (v, 1 - b) in rule.guard
            for A in syms:
                if refuted or A != rule.pop:
                    rules.append(Rule(name, letter, A, rej, (A,)))
                    continue
                for br in rule.branches:
                    nb = dict(br.command).get(v, b)
                    rules.append(Rule(name, letter, A, var_state[(v, nb)], br.push))
    for A in syms:
        for p in aeps.states:
            rules.append(Rule(p, end, A, acc if p == aeps.fin else rej, (A,)))
        for (v, b), name in var_state.items():
            rules.append(Rule(name, end, A, acc if b == 0 else rej, (A,)))
    for sink in (acc, rej):
        for letter in letters + (end,):
            for A in syms:
                rules.append(Rule(sink, letter, A, sink, (A,)))

    states = tuple(aeps.states) + tuple(var_state.values()) + (acc, rej)
    pda = complete(Pda(states, letters + (end,), syms, aeps.bottom, tuple(rules)))
    root = PseudoConfig(
        frozenset([aeps.init]) | {var_state[(v, 0)] for v in aeps.vars}, (aeps.bottom,)
    )
    return AepsReduction(pda, root, acc, var_state, letters, end, rej)


def config_states(red: AepsReduction, config: AepsConfig) -> frozenset:
    """The PDA state set simulating ``config``."""
    return frozenset([config.state]) | {red.var_state[p] for p in config.valuation}


def expand(aeps: Aeps) -> Aps:
    """Variable-free APS over (state, valuation) pairs.

    Used as a brute-force oracle: accepting runs of the AEPS correspond to
    accepting runs of this APS from (init, 0) to (fin, 0).
    """
    vals = [tuple(zip(aeps.vars, bits))
            for bits in itertools.product((0, 1), repeat=len(aeps.vars))]
    states = [(q, val) for q in aeps.states for val in vals]
    rules = []
    for rule in aeps.rules:
        for val in vals:
            cfg = AepsConfig(rule.src, (rule.pop,), val)
            if not enabled(rule, cfg):
                continue
            branches = []
            for br in rule.branches:
                cmd = dict(br.command)
                nv = tuple((v, cmd.get(v, b)) for v, b in val)
                branches.append(((br.dst, nv), br.push))
            rules.append(ApsRule((rule.src, val), rule.pop, tuple(branches)))
    zero = aeps.zero()
    return Aps(tuple(states), aeps.stack_syms, aeps.bottom, tuple(rules),
               (aeps.init, zero), (aeps.fin, zero))


def bounded_accepts(aeps: Aeps, bounds=None) -> Optional[bool]:
    """True if an accepting run exists within the stack bound, else False."""
    from .oracle import Bounds, Yes, bounded_aps_run_search

    res = bounded_aps_run_search(expand(aeps), bounds=bounds or Bounds())
    return isinstance(res, Yes)
