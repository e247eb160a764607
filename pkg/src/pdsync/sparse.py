"""Sparse emptiness: accepting runs with at most k leaves.

The search enumerates structured trees (skeletons of compressed runs) and
labels each one bottom-up with N-automata: leaves store {(fin, bottom)},
simple vertices take pre* of their child, complex vertices combine the
children by a product construction guarded by the APS rules of matching
arity.  Automata are cached per subtree shape, so the enumeration shares
work between trees.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .aps import (
    DEFAULT_STATE_BUDGET, Aps, Nps, NpsRule, RunNode, build_aps, derive_nps,
    run_to_supersync,
)
from .errors import CapExceeded, NotDeterministic, ValidationError
from .pda import Pda, complete, is_deterministic

__all__ = [
    "NAutomaton", "Nps", "NpsRule", "LEAF", "simple", "complex_", "stores", "prestar",
    "leaf_automaton", "enumerate_structured", "is_structured", "leaf_count", "vertex_count",
    "check", "sparse_empty", "det_special_sync",
]


# Automaton states are hashed constantly and products nest, so the hash is
# computed once at construction.

@dataclass(frozen=True)
class Entry:
    state: object
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("entry", self.state)))

    def __hash__(self):
        return self._hash


@dataclass(frozen=True)
class Acc:
    pass


@dataclass(frozen=True)
class Prod:
    parts: tuple
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("prod", self.parts)))

    def __hash__(self):
        return self._hash


@dataclass
class NAutomaton:
    """Finite automaton over stack letters with one entry state per system state.

    ``states`` is an insertion-ordered dict (state -> index) so that every
    traversal is reproducible.  ``prov`` maps each transition added by this
    automaton's own construction step to its justification; ``base`` points
    at the automaton a pre* step started from.
    """

    states: dict
    entries: dict
    trans: dict  # (state, letter) -> dict of successor states
    accepting: frozenset
    prov: dict = field(default_factory=dict)
    serial: dict = field(default_factory=dict)
    base: "NAutomaton | None" = None
    kind: str = "leaf"
    children: tuple = ()

    def step(self, states, letter):
        out = {}
        for q in states:
            for r in self.trans.get((q, letter), ()):
                out[r] = None
        return out

    def reach(self, start, word):
        """Map each state reachable from ``start`` by ``word`` to one path."""
        layer = {start: ()}
        for letter in word:
            nxt = {}
            for q, path in layer.items():
                for r in self.trans.get((q, letter), ()):
                    if r not in nxt:
                        nxt[r] = path + ((q, letter, r),)
            layer = nxt
            if not layer:
                break
        return layer

    def accepting_path(self, q, word):
        start = self.entries.get(q)
        if start is None:
            return None
        for r, path in self.reach(start, word).items():
            if r in self.accepting:
                return path
        return None

    def transition_count(self):
        return sum(len(v) for v in self.trans.values())


def stores(m: NAutomaton, config) -> bool:
    q, word = config
    start = m.entries.get(q)
    if start is None:
        return False
    current = {start: None}
    for letter in word:
        current = m.step(current, letter)
        if not current:
            return False
    return any(r in m.accepting for r in current)


def leaf_automaton(aps: Aps) -> NAutomaton:
    states = {Entry(q): i for i, q in enumerate(aps.states)}
    states[Acc()] = len(states)
    return NAutomaton(
        states=states,
        entries={q: Entry(q) for q in aps.states},
        trans={(Entry(aps.fin), aps.bottom): {Acc(): None}},
        accepting=frozenset([Acc()]),
    )


def prestar(nps: Nps, m: NAutomaton) -> NAutomaton:
    """Saturate ``m`` so that it stores all predecessors of its configurations.

    The state set is unchanged.  For a rule (p, A) -> (q, w), whenever the
    entry of q reaches s by reading w, the transition (entry(p), A, s) is
    added; for w empty that is s = entry(q).
    """
    trans = {key: dict(value) for key, value in m.trans.items()}
    out = NAutomaton(
        states=m.states, entries=m.entries, trans=trans, accepting=m.accepting,
        base=m, kind="simple", children=(m,),
    )
    rules = [r for r in nps.rules if r.src in m.entries and r.dst in m.entries]
    # Reading a push word only uses transitions on its letters, so after the
    # first pass a rule is revisited only when one of them gained a transition.
    pending = rules
    while pending:
        grown = set()
        for rule in pending:
            src = m.entries[rule.src]
            for s, path in out.reach(m.entries[rule.dst], rule.push).items():
                bucket = trans.setdefault((src, rule.pop), {})
                if s in bucket:
                    continue
                bucket[s] = None
                t = (src, rule.pop, s)
                out.prov[t] = (rule, path)
                out.serial[t] = len(out.serial)
                grown.add(rule.pop)
        pending = [r for r in rules if grown.intersection(r.push)]
    return out


def _product(aps, children, state_budget):
    """Automaton for a complex vertex whose subtrees carry ``children``."""
    arity = len(children)
    states = {Entry(q): i for i, q in enumerate(aps.states)}
    entries = {q: Entry(q) for q in aps.states}
    trans = {}
    prov = {}
    frontier = deque()
    for rule in aps.rules:
        if len(rule.branches) != arity:
            continue
        reached = []
        for (dst, push), child in zip(rule.branches, children):
            start = child.entries.get(dst)
            paths = child.reach(start, push) if start is not None else {}
            if not paths:
                break
            reached.append(list(paths.items()))
        else:
            src = Entry(rule.src)
            for combo in itertools.product(*reached):
                target = Prod(tuple(s for s, _ in combo))
                bucket = trans.setdefault((src, rule.pop), {})
                if target in bucket:
                    continue
                bucket[target] = None
                prov[(src, rule.pop, target)] = (rule, tuple(p for _, p in combo))
                if target not in states:
                    states[target] = len(states)
                    frontier.append(target)
    while frontier:
        cur = frontier.popleft()
        for letter in aps.stack_syms:
            options = []
            for part, child in zip(cur.parts, children):
                nxt = list(child.trans.get((part, letter), ()))
                if not nxt:
                    break
                options.append(nxt)
            else:
                bucket = trans.setdefault((cur, letter), {})
                for combo in itertools.product(*options):
                    target = Prod(combo)
                    bucket[target] = None
                    if target not in states:
                        states[target] = len(states)
                        frontier.append(target)
                        if len(states) > state_budget:
                            raise CapExceeded(
                                f"product automaton exceeded the state budget of {state_budget}"
                            )
    accepting = frozenset(
        s for s in states
        if isinstance(s, Prod) and all(p in c.accepting for p, c in zip(s.parts, children))
    )
    return NAutomaton(
        states=states, entries=entries, trans=trans, accepting=accepting, prov=prov,
        kind="complex", children=tuple(children),
    )


# -- structured trees -------------------------------------------------------
#
# LEAF, ("simple", child) and ("complex", (child, child, ...)) as nested
# tuples; the tuple itself is the canonical serialized form.

LEAF = ("leaf",)


def simple(child):
    return ("simple", child)


def complex_(*children):
    return ("complex", tuple(children))


def leaf_count(tree) -> int:
    if tree[0] == "leaf":
        return 1
    if tree[0] == "simple":
        return leaf_count(tree[1])
    return sum(leaf_count(c) for c in tree[1])


def vertex_count(tree) -> int:
    if tree[0] == "leaf":
        return 1
    if tree[0] == "simple":
        return 1 + vertex_count(tree[1])
    return 1 + sum(vertex_count(c) for c in tree[1])


def is_structured(tree) -> bool:
    if tree[0] == "leaf":
        return True
    if tree[0] == "simple":
        return tree[1][0] != "simple" and is_structured(tree[1])
    return len(tree[1]) >= 2 and all(is_structured(c) for c in tree[1])


def _compositions(n, parts_min=2):
    """Ordered compositions of n into at least ``parts_min`` positive parts."""
    def go(rest):
        if rest == 0:
            yield ()
            return
        for first in range(1, rest + 1):
            for tail in go(rest - first):
                yield (first,) + tail
    for comp in go(n):
        if len(comp) >= parts_min:
            yield comp


def enumerate_structured(k: int):
    """Yield every structured tree with at most ``k`` leaves exactly once.

    Trees come in order of increasing leaf count; within a leaf count,
    complex-rooted trees precede their simple-rooted twins.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    complex_by_n = {}
    trees_by_n = {}
    for n in range(1, k + 1):
        if n == 1:
            cs = [LEAF]
        else:
            cs = []
            for comp in _compositions(n):
                for kids in itertools.product(*(trees_by_n[part] for part in comp)):
                    cs.append(("complex", kids))
        complex_by_n[n] = cs
        trees_by_n[n] = cs + [simple(c) for c in cs]
    seen = set()
    for n in range(1, k + 1):
        for tree in trees_by_n[n]:
            if tree not in seen:
                seen.add(tree)
                yield tree


# -- Check ----------------------------------------------------------------

class _Checker:
    def __init__(self, aps, nps=None, state_budget=DEFAULT_STATE_BUDGET):
        self.aps = aps
        self.nps = nps if nps is not None else derive_nps(aps)
        self.state_budget = state_budget
        self.cache = {}
        self._leaf = None

    def automaton(self, tree):
        hit = self.cache.get(tree)
        if hit is not None:
            return hit
        if tree[0] == "leaf":
            if self._leaf is None:
                self._leaf = leaf_automaton(self.aps)
            m = self._leaf
        elif tree[0] == "simple":
            m = prestar(self.nps, self.automaton(tree[1]))
        else:
            m = _product(self.aps, [self.automaton(c) for c in tree[1]], self.state_budget)
        self.cache[tree] = m
        return m

    def vertex_map(self, tree, path=()):
        out = {path: self.automaton(tree)}
        if tree[0] == "simple":
            out.update(self.vertex_map(tree[1], path + (0,)))
        elif tree[0] == "complex":
            for i, child in enumerate(tree[1]):
                out.update(self.vertex_map(child, path + (i,)))
        return out


def check(aps: Aps, tree, k=None, checker=None):
    """Label ``tree`` bottom-up; report whether (init, bottom) is stored at the root.

    Returns ``(answer, {vertex path: NAutomaton})``.
    """
    if not is_structured(tree):
        raise ValidationError("tree is not structured")
    if k is not None and leaf_count(tree) > k:
        raise ValidationError(f"tree has more than {k} leaves")
    checker = checker or _Checker(aps)
    root = checker.automaton(tree)
    return stores(root, (aps.init, (aps.bottom,))), checker.vertex_map(tree)


def _label(aps, tree, m, config, path):
    """Expand a stored configuration into an explicit run of the subtree shape."""
    q, word = config
    kind = tree[0]
    if kind == "leaf":
        if config != (aps.fin, (aps.bottom,)):
            raise AssertionError("leaf automaton stored a non-final configuration")
        return RunNode(q, word)
    if kind == "simple":
        steps = []
        path = list(path)
        while path and path[0] in m.prov:
            rule, pushed = m.prov[path[0]]
            steps.append((q, word, rule))
            q, word = rule.dst, rule.push + word[1:]
            path = list(pushed) + path[1:]
        node = _label(aps, tree[1], m.base, (q, word), tuple(path))
        for sq, sword, rule in reversed(steps):
            node = RunNode(sq, sword, rule.as_aps_rule(), (node,))
        return node
    rule, child_paths = m.prov[path[0]]
    rest = word[1:]
    children = []
    for i, ((dst, push), child_tree, child_m) in enumerate(
        zip(rule.branches, tree[1], m.children)
    ):
        tail = tuple((s.parts[i], letter, d.parts[i]) for s, letter, d in path[1:])
        children.append(
            _label(aps, child_tree, child_m, (dst, push + rest), child_paths[i] + tail)
        )
    return RunNode(q, word, rule, tuple(children))


def sparse_empty(aps: Aps, k: int, state_budget=DEFAULT_STATE_BUDGET):
    """Is there an accepting run with at most ``k`` leaves?

    Returns ``(answer, run)``; the run is expanded from the first structured
    tree (in enumeration order) that passes Check.
    """
    checker = _Checker(aps, state_budget=state_budget)
    root_config = (aps.init, (aps.bottom,))
    for tree in enumerate_structured(k):
        ok, _ = check(aps, tree, checker=checker)
        if ok:
            m = checker.automaton(tree)
            path = m.accepting_path(*root_config)
            return True, _label(aps, tree, m, root_config, path)
    return False, None


def det_special_sync(pda: Pda, initial, target, k=None, state_budget=DEFAULT_STATE_BUDGET):
    """Special-Sync for deterministic PDAs via sparse emptiness on a capped A_P."""
    pda = complete(pda)
    if not is_deterministic(pda):
        raise NotDeterministic("det_special_sync requires a deterministic PDA")
    initial = frozenset(initial)
    if not initial:
        raise ValidationError("initial set must be nonempty")
    bound = len(initial)
    aps = build_aps(pda, initial, target, size_cap=bound, state_budget=state_budget)
    ok, run = sparse_empty(aps, k if k is not None else bound, state_budget=state_budget)
    if not ok:
        return False, None
    return True, run_to_supersync(aps, run)
