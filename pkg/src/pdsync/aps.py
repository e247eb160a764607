"""Variable-free alternating pushdown systems.

Contains the subset construction that turns a PDA into an APS whose
accepting runs are exactly super-synchronisers, an emptiness check by
alternating pre* saturation, and run extraction from the saturation
provenance.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .errors import CapExceeded, NotAnApsRunOfAP, ValidationError
from .pda import Pda, PseudoConfig, check_push, complete, obs_classes
from .witness import Node

DEFAULT_STATE_BUDGET = 200_000


@dataclass(frozen=True)
class ApsRule:
    src: object
    pop: str
    branches: tuple  # ((dst, push), ...)

    def __post_init__(self):
        if not self.branches:
            raise ValidationError("APS rule without branches")
        object.__setattr__(
            self, "branches", tuple((dst, tuple(push)) for dst, push in self.branches)
        )


@dataclass(frozen=True)
class Aps:
    states: tuple
    stack_syms: tuple
    bottom: str
    rules: tuple
    init: object
    fin: object
    # A_P bookkeeping: rule -> input letter, and the source PDA.  Not part of
    # the system's identity.
    letters: Optional[dict] = field(default=None, compare=False, hash=False)
    pda: Optional[Pda] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        known = set(self.states)
        syms = set(self.stack_syms)
        if self.bottom not in syms:
            raise ValidationError("bottom symbol is not a stack letter")
        if self.init not in known or self.fin not in known:
            raise ValidationError("init and fin must be states")
        for rule in self.rules:
            if rule.src not in known or rule.pop not in syms:
                raise ValidationError(f"rule {rule} uses unknown identifiers")
            for dst, push in rule.branches:
                if dst not in known or any(A not in syms for A in push):
                    raise ValidationError(f"rule {rule} uses unknown identifiers")
                check_push(rule.pop, push, self.bottom, what=f"rule {rule}")

    @cached_property
    def state_index(self):
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def by_head(self):
        out = {}
        for rule in self.rules:
            out.setdefault((rule.src, rule.pop), []).append(rule)
        return out

    def size(self):
        return len(self.states) + len(self.stack_syms) + sum(
            1 + sum(1 + len(push) for _, push in r.branches) for r in self.rules
        )


@dataclass(frozen=True)
class NpsRule:
    src: object
    pop: str
    dst: object
    push: tuple

    def as_aps_rule(self):
        return ApsRule(self.src, self.pop, ((self.dst, self.push),))


@dataclass(frozen=True)
class Nps:
    states: tuple
    stack_syms: tuple
    bottom: str
    rules: tuple


@dataclass(frozen=True)
class RunNode:
    state: object
    stack: tuple
    rule: Optional[ApsRule] = None
    children: tuple = ()

    def leaf_count(self):
        if not self.children:
            return 1
        return sum(c.leaf_count() for c in self.children)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def depth(self):
        return 1 + max((c.depth() for c in self.children), default=0)


ApsRun = RunNode


def derive_nps(aps: Aps) -> Nps:
    rules = tuple(
        NpsRule(r.src, r.pop, r.branches[0][0], r.branches[0][1])
        for r in aps.rules if len(r.branches) == 1
    )
    return Nps(aps.states, aps.stack_syms, aps.bottom, rules)


def validate_run(aps: Aps, run: RunNode, root=None) -> bool:
    """True iff ``run`` is an accepting run of ``aps`` from ``root``."""
    if root is None:
        root = (aps.init, (aps.bottom,))
    if (run.state, run.stack) != root:
        return False
    rules = set(aps.rules)
    todo = [run]
    while todo:
        node = todo.pop()
        if not node.children:
            if (node.state, node.stack) != (aps.fin, (aps.bottom,)):
                return False
            continue
        rule = node.rule
        if rule is None or rule not in rules:
            return False
        if rule.src != node.state or not node.stack or rule.pop != node.stack[0]:
            return False
        if len(rule.branches) != len(node.children):
            return False
        rest = node.stack[1:]
        for (dst, push), child in zip(rule.branches, node.children):
            if (child.state, child.stack) != (dst, push + rest):
                return False
        todo.extend(node.children)
    return True


# -- A_P ------------------------------------------------------------------

def subset_name(pda: Pda, subset) -> str:
    return "{" + ",".join(pda.sorted_states(subset)) + "}"


def build_aps(pda: Pda, initial, target, size_cap=None, state_budget=DEFAULT_STATE_BUDGET) -> Aps:
    """Subset-state APS whose accepting runs are the super-synchronisers.

    Only subsets reachable from ``initial`` through observation classes are
    generated.  With ``size_cap`` set, rules leading to a subset larger than
    the cap are dropped; for deterministic PDAs with ``size_cap >= |initial|``
    no rule is ever dropped.
    """
    pda = complete(pda)
    init = frozenset(initial)
    if not init:
        raise ValidationError("initial set must be nonempty")
    fin = frozenset([target])
    seen = {init: None}
    queue = deque([init])
    rules = {}
    while queue:
        S = queue.popleft()
        for a in pda.inputs:
            for A in pda.stack_syms:
                classes = obs_classes(pda, S, a, A)
                if not classes:
                    continue
                if size_cap is not None and any(len(c.targets) > size_cap for c in classes):
                    continue
                rule = ApsRule(S, A, tuple((c.targets, c.push) for c in classes))
                rules.setdefault(rule, a)
                for c in classes:
                    if c.targets not in seen:
                        seen[c.targets] = None
                        queue.append(c.targets)
                        if len(seen) > state_budget:
                            raise CapExceeded(
                                f"A_P exceeded the state budget of {state_budget} subsets"
                            )
    seen.setdefault(fin, None)
    return Aps(
        states=tuple(seen), stack_syms=pda.stack_syms, bottom=pda.bottom,
        rules=tuple(rules), init=init, fin=fin, letters=dict(rules), pda=pda,
    )


def run_to_supersync(aps: Aps, run: RunNode) -> Node:
    """Reinterpret an accepting run of A_P as a super-synchroniser."""
    if aps.letters is None or aps.pda is None:
        raise NotAnApsRunOfAP("APS carries no rule-to-letter map; it was not built by build_aps")

    def convert(node):
        label = PseudoConfig(node.state, node.stack)
        if not node.children:
            return Node(label)
        letter = aps.letters.get(node.rule)
        if letter is None:
            raise NotAnApsRunOfAP(f"rule {node.rule} does not belong to A_P")
        return Node(label, letter, tuple(convert(c) for c in node.children))

    if not isinstance(run.state, frozenset):
        raise NotAnApsRunOfAP("run states are not subsets of PDA states")
    return convert(run)


# -- alternating saturation -----------------------------------------------

@dataclass(frozen=True)
class _Entry:
    state: object


_ACC = "acc"


@dataclass(frozen=True)
class Deriv:
    """Run of the alternating automaton: a hole when ``trans`` is None."""

    state: object
    trans: Optional[tuple] = None
    children: tuple = ()  # ((target, Deriv), ...)


@dataclass
class Provenance:
    transitions: dict  # (src, letter, targets) -> (serial, round, rule, derivs)
    accepting: Optional[Deriv]
    rounds: int


class _AltAutomaton:
    def __init__(self, aps):
        self.aps = aps
        self.key = {_ACC: -1}
        for i, q in enumerate(aps.states):
            self.key[_Entry(q)] = i
        self.trans = {}  # (state, letter) -> list of frozensets
        self.info = {}
        self.serial = 0

    def sorted_targets(self, targets):
        return sorted(targets, key=self.key.__getitem__)

    def add(self, src, letter, targets, rnd, rule, derivs):
        bucket = self.trans.setdefault((src, letter), [])
        for old in bucket:
            if old <= targets:
                return False
        bucket[:] = [old for old in bucket if not targets <= old]
        bucket.append(targets)
        self.info[(src, letter, targets)] = (self.serial, rnd, rule, derivs)
        self.serial += 1
        return True

    def read(self, state, word):
        """Minimal frontiers reachable by reading ``word`` from ``state``."""
        memo = {}

        def go(q, i):
            key = (q, i)
            if key in memo:
                return memo[key]
            if i == len(word):
                out = {frozenset([q]): Deriv(q)}
                memo[key] = out
                return out
            out = {}
            for targets in self.trans.get((q, word[i]), ()):
                parts = [go(t, i + 1) for t in self.sorted_targets(targets)]
                if any(not p for p in parts):
                    continue
                tlist = self.sorted_targets(targets)
                for combo in itertools.product(*(list(p.items()) for p in parts)):
                    frontier = frozenset().union(*(f for f, _ in combo))
                    if frontier not in out:
                        out[frontier] = Deriv(
                            q, (q, word[i], targets),
                            tuple((t, d) for t, (_, d) in zip(tlist, combo)),
                        )
            memo[key] = _minimal(out)
            return memo[key]

        return go(state, 0)


def _minimal(frontiers):
    keys = sorted(frontiers, key=len)
    kept = {}
    for f in keys:
        if not any(k <= f for k in kept):
            kept[f] = frontiers[f]
    return kept


def aps_emptiness(aps: Aps):
    """Decide whether ``aps`` has an accepting run.

    Returns ``(answer, provenance)``.  The answer is True iff (init, bottom)
    belongs to pre* of {(fin, bottom)}.
    """
    auto = _AltAutomaton(aps)
    auto.add(_Entry(aps.fin), aps.bottom, frozenset([_ACC]), 0, None, None)
    rnd = 0
    changed = True
    while changed:
        changed = False
        rnd += 1
        for rule in aps.rules:
            per_branch = []
            for dst, push in rule.branches:
                frontiers = auto.read(_Entry(dst), push)
                if not frontiers:
                    break
                per_branch.append(list(frontiers.items()))
            else:
                src = _Entry(rule.src)
                for combo in itertools.product(*per_branch):
                    targets = frozenset().union(*(f for f, _ in combo))
                    derivs = tuple(d for _, d in combo)
                    if auto.add(src, rule.pop, targets, rnd, rule, derivs):
                        changed = True
    accepting = None
    for frontier, deriv in auto.read(_Entry(aps.init), (aps.bottom,)).items():
        if frontier <= {_ACC}:
            accepting = deriv
            break
    prov = Provenance(auto.info, accepting, rnd)
    return accepting is not None, prov


def _graft(deriv, conts):
    if deriv.trans is None:
        return conts[deriv.state]
    return Deriv(
        deriv.state, deriv.trans,
        tuple((t, _graft(d, conts)) for t, d in deriv.children),
    )


def extract_run(aps: Aps, prov: Provenance) -> RunNode:
    """Rebuild an accepting run from saturation provenance.

    Each step replaces the transition at the head of the acceptance
    derivation by the derivations that justified it, all of which were added
    strictly earlier; the multiset of serial numbers therefore shrinks and
    the recursion terminates.
    """
    if prov.accepting is None:
        raise ValueError("no accepting run recorded")

    def build(q, word, deriv):
        src, letter, targets = deriv.trans
        _, _, rule, derivs = prov.transitions[deriv.trans]
        if rule is None:
            return RunNode(q, word)
        conts = dict(deriv.children)
        rest = word[1:]
        children = []
        for (dst, push), d in zip(rule.branches, derivs):
            children.append(build(dst, push + rest, _graft(d, conts)))
        return RunNode(q, word, rule, tuple(children))

    return build(aps.init, (aps.bottom,), prov.accepting)


def nondet_special_sync(pda: Pda, initial, target, state_budget=DEFAULT_STATE_BUDGET):
    """Special-Sync for arbitrary PDAs: A_P plus alternating saturation."""
    aps = build_aps(pda, initial, target, state_budget=state_budget)
    ok, prov = aps_emptiness(aps)
    if not ok:
        return False, None
    run = extract_run(aps, prov)
    return True, run_to_supersync(aps, run)
