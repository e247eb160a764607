"""Polynomial gadget reductions between the synchronisation variants.

Each construction returns a ReductionOutput holding the reduced instance,
the source instance, and a name_map describing the role of every fresh
state and letter.  ``pull_back_witness`` translates a witness of the
reduced instance into one for the source.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidSubset, PullBackFailure, ValidationError
from .pda import Pda, PseudoConfig, Rule, complete
from .witness import (
    HomingWord, Node, SuperSynchroniser, Synchroniser, check_witness,
)

ADA = "ada"
SUBSET = "subset"
GIVEN = "given"
SUPER = "super"
SPECIAL = "special"
HOMING = "homing"
SUBSET_HOMING = "subset-homing"

VARIANTS = (ADA, SUBSET, GIVEN, SUPER, SPECIAL, HOMING, SUBSET_HOMING)
NEEDS_TARGET = {GIVEN, SUPER, SPECIAL}


@dataclass(frozen=True)
class ProblemInstance:
    pda: Pda
    variant: str
    initial: Optional[frozenset] = None
    target: Optional[str] = None
    stack: Optional[tuple] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown variant {self.variant!r}")
        pda = self.pda
        initial = self.initial
        if self.variant in (ADA, HOMING):
            initial = frozenset(pda.states)
        elif initial is None:
            raise ValidationError(f"variant {self.variant} needs an initial set I")
        initial = frozenset(initial)
        object.__setattr__(self, "initial", initial)
        for q in initial:
            if q not in pda.state_index:
                raise ValidationError(f"I mentions unknown state {q!r}")
        if self.variant in NEEDS_TARGET:
            if self.target not in pda.state_index:
                raise ValidationError(f"variant {self.variant} needs a target state s")
        else:
            object.__setattr__(self, "target", None)
        stack = tuple(self.stack) if self.stack is not None else (pda.bottom,)
        if self.variant == SPECIAL and stack != (pda.bottom,):
            raise ValidationError("special-sync instances start from the bare bottom symbol")
        pda.check_stack(stack, what="start stack")
        object.__setattr__(self, "stack", stack)

    @property
    def root(self):
        return PseudoConfig(self.initial, self.stack)

    def witness_kind(self, found_target=None):
        if self.variant in (HOMING, SUBSET_HOMING):
            return HomingWord()
        if self.variant in (SUPER, SPECIAL):
            return SuperSynchroniser(self.target)
        target = self.target if self.target is not None else found_target
        return Synchroniser(target)


@dataclass(frozen=True)
class ReductionOutput:
    instance: ProblemInstance
    tag: str
    name_map: dict = field(compare=False, hash=False)
    source: ProblemInstance = field(compare=False, hash=False)


# -- helpers ----------------------------------------------------------------

def _fresh(existing, name):
    while name in existing:
        name = name + "'"
    return name


def _need_subset(initial):
    if not initial:
        raise InvalidSubset("the initial set I must be nonempty")


def _moves(pda, state_to, letter, dst):
    """``state`` moves to ``dst`` on ``letter`` leaving the stack untouched."""
    return [Rule(state_to, letter, A, dst, (A,)) for A in pda.stack_syms]


def _pda(states, inputs, stack_syms, bottom, rules):
    return complete(Pda(tuple(states), tuple(inputs), tuple(stack_syms), bottom, tuple(rules)))


def _min_state(pda, subset):
    return pda.sorted_states(subset)[0]


# -- constructions ------------------------------------------------------------

def subset_to_ada(pda: Pda, initial, stack) -> ReductionOutput:
    """Subset instance -> whole-state-set instance via a fresh bottom marker #."""
    pda = complete(pda)
    initial = frozenset(initial)
    _need_subset(initial)
    hash_sym = _fresh(set(pda.stack_syms), "g:#")
    q_i = _min_state(pda, initial)
    syms = pda.stack_syms[:-1] + (hash_sym,) + pda.stack_syms[-1:] \
        if pda.stack_syms[-1] == pda.bottom else pda.stack_syms + (hash_sym,)
    rules = list(pda.rules)
    for q in pda.states:
        for a in pda.inputs:
            rules.append(Rule(q, a, hash_sym, q if q in initial else q_i, ()))
    new = _pda(pda.states, pda.inputs, syms, pda.bottom, rules)
    src_variant = SUBSET
    out = ProblemInstance(new, ADA, stack=(hash_sym,) + tuple(stack))
    return ReductionOutput(
        out, "subset_to_ada", {hash_sym: "marker", "q_I": q_i},
        ProblemInstance(pda, src_variant, initial, stack=tuple(stack)),
    )


def subset_to_given(pda: Pda, initial, stack) -> ReductionOutput:
    """Force the observer to announce the synchronising state up front."""
    pda = complete(pda)
    initial = frozenset(initial)
    _need_subset(initial)
    names = {}
    pair = {}
    for p in pda.states:
        for q in pda.states + ("~",):
            name = f"{p}/{q}"
            pair[(p, q)] = name
            names[name] = ("pair", p, q)
    used = set(names) | set(pda.states)
    acc = _fresh(used, "g:acc")
    rej = _fresh(used | {acc}, "g:rej")
    names[acc] = "accept"
    names[rej] = "reject"
    decide = {q: _fresh(set(pda.inputs), f"g:dec:{q}") for q in pda.states}
    done = {q: _fresh(set(pda.inputs), f"g:done:{q}") for q in pda.states}
    for q in pda.states:
        names[decide[q]] = ("decide", q)
        names[done[q]] = ("done", q)
    states = [pair[(p, q)] for p in pda.states for q in pda.states]
    states += [pair[(p, "~")] for p in pda.states] + [acc, rej]
    inputs = list(pda.inputs) + [decide[q] for q in pda.states] + [done[q] for q in pda.states]
    rules = []
    for p in pda.states:
        for q in pda.states:
            rules += _moves(pda, pair[(p, "~")], decide[q], pair[(p, q)])
    for r in pda.rules:
        for q in pda.states:
            rules.append(Rule(pair[(r.src, q)], r.letter, r.pop, pair[(r.dst, q)], r.push))
    for q in pda.states:
        for st in states:
            rules += _moves(pda, st, done[q], acc if st in (pair[(q, q)], acc) else rej)
    new = _pda(states, inputs, pda.stack_syms, pda.bottom, rules)
    out = ProblemInstance(
        new, GIVEN, frozenset(pair[(p, "~")] for p in initial), acc, tuple(stack)
    )
    return ReductionOutput(
        out, "subset_to_given", names,
        ProblemInstance(pda, SUBSET, initial, stack=tuple(stack)),
    )


def _two_copies(pda, target, tag):
    names = {}
    copy = {}
    for p in pda.states:
        for b in (0, 1):
            copy[(p, b)] = f"{p}/{b}"
            names[copy[(p, b)]] = ("copy", p, b)
    used = set(names)
    acc = _fresh(used, "g:acc")
    rej = {b: _fresh(used | {acc}, f"g:rej/{b}") for b in (0, 1)}
    names[acc] = "accept"
    for b in (0, 1):
        names[rej[b]] = ("reject", b)
    end = _fresh(set(pda.inputs), "g:end")
    names[end] = "end"
    states = [copy[(p, b)] for b in (0, 1) for p in pda.states] + [acc, rej[0], rej[1]]
    rules = []
    for r in pda.rules:
        for b in (0, 1):
            rules.append(Rule(copy[(r.src, b)], r.letter, r.pop, copy[(r.dst, b)], r.push))
    rules += _moves(pda, acc, end, acc)
    for b in (0, 1):
        for p in pda.states:
            rules += _moves(pda, copy[(p, b)], end, acc if p == target else rej[b])
    new = _pda(states, list(pda.inputs) + [end], pda.stack_syms, pda.bottom, rules)
    return new, copy, names


def given_to_subset(pda: Pda, initial, target, stack) -> ReductionOutput:
    pda = complete(pda)
    initial = frozenset(initial)
    _need_subset(initial)
    new, copy, names = _two_copies(pda, target, "given_to_subset")
    out = ProblemInstance(
        new, SUBSET, frozenset(copy[(p, b)] for p in initial for b in (0, 1)), stack=tuple(stack)
    )
    return ReductionOutput(
        out, "given_to_subset", names,
        ProblemInstance(pda, GIVEN, initial, target, tuple(stack)),
    )


def given_to_subset_homing(pda: Pda, initial, target, stack) -> ReductionOutput:
    pda = complete(pda)
    initial = frozenset(initial)
    _need_subset(initial)
    new, copy, names = _two_copies(pda, target, "given_to_subset_homing")
    out = ProblemInstance(
        new, SUBSET_HOMING, frozenset(copy[(p, b)] for p in initial for b in (0, 1)),
        stack=tuple(stack),
    )
    return ReductionOutput(
        out, "given_to_subset_homing", names,
        ProblemInstance(pda, GIVEN, initial, target, tuple(stack)),
    )


def given_to_super(pda: Pda, initial, target, stack) -> ReductionOutput:
    """Append `end` (commit to the target) and `pop` (drain the stack)."""
    pda = complete(pda)
    initial = frozenset(initial)
    _need_subset(initial)
    acc = _fresh(set(pda.states), "g:acc")
    rej = _fresh(set(pda.states) | {acc}, "g:rej")
    end = _fresh(set(pda.inputs), "g:end")
    pop = _fresh(set(pda.inputs) | {end}, "g:pop")
    rules = list(pda.rules)
    for q in pda.states + (acc, rej):
        rules += _moves(pda, q, end, acc if q in (target, acc) else rej)
        if q != acc:
            rules += _moves(pda, q, pop, rej)
    for A in pda.stack_syms:
        rules.append(Rule(acc, pop, A, acc, (A,) if A == pda.bottom else ()))
    new = _pda(pda.states + (acc, rej), pda.inputs + (end, pop), pda.stack_syms,
               pda.bottom, rules)
    out = ProblemInstance(new, SUPER, initial, acc, tuple(stack))
    return ReductionOutput(
        out, "given_to_super", {acc: "accept", rej: "reject", end: "end", pop: "pop"},
        ProblemInstance(pda, GIVEN, initial, target, tuple(stack)),
    )


def super_to_given(pda: Pda, initial, target, stack) -> ReductionOutput:
    """`end` reaches the accepting sink only from the target with an empty stack."""
    pda = complete(pda)
    initial = frozenset(initial)
    _need_subset(initial)
    acc = _fresh(set(pda.states), "g:acc")
    rej = _fresh(set(pda.states) | {acc}, "g:rej")
    end = _fresh(set(pda.inputs), "g:end")
    rules = list(pda.rules)
    for q in pda.states + (acc, rej):
        for A in pda.stack_syms:
            good = q == acc or (q == target and A == pda.bottom)
            rules.append(Rule(q, end, A, acc if good else rej, (A,)))
    new = _pda(pda.states + (acc, rej), pda.inputs + (end,), pda.stack_syms, pda.bottom, rules)
    out = ProblemInstance(new, GIVEN, initial, acc, tuple(stack))
    return ReductionOutput(
        out, "super_to_given", {acc: "accept", rej: "reject", end: "end"},
        ProblemInstance(pda, SUPER, initial, target, tuple(stack)),
    )


def super_to_special(pda: Pda, initial, target, stack) -> ReductionOutput:
    """Fresh copies of the initial states load the start stack on the first input."""
    pda = complete(pda)
    initial = frozenset(initial)
    _need_subset(initial)
    stack = tuple(stack)
    used = set(pda.states)
    primed = {}
    for q in pda.sorted_states(initial):
        primed[q] = _fresh(used, f"{q}'")
        used.add(primed[q])
    rules = list(pda.rules)
    for q, qp in primed.items():
        for a in pda.inputs:
            rules.append(Rule(qp, a, pda.bottom, q, stack))
    new = _pda(pda.states + tuple(primed.values()), pda.inputs, pda.stack_syms, pda.bottom, rules)
    out = ProblemInstance(new, SPECIAL, frozenset(primed.values()), target, (pda.bottom,))
    return ReductionOutput(
        out, "super_to_special", {qp: ("loader", q) for q, qp in primed.items()},
        ProblemInstance(pda, SUPER, initial, target, stack),
    )


def homing_to_given(pda: Pda, stack) -> ReductionOutput:
    """One fresh letter per state: it accepts that state and rejects the rest."""
    pda = complete(pda)
    acc = _fresh(set(pda.states), "g:acc")
    rej = _fresh(set(pda.states) | {acc}, "g:rej")
    used = set(pda.inputs)
    pick = {}
    for q in pda.states:
        pick[q] = _fresh(used, f"g:is:{q}")
        used.add(pick[q])
    rules = list(pda.rules)
    for q in pda.states:
        for p in pda.states:
            rules += _moves(pda, p, pick[q], acc if p == q else rej)
    new = _pda(pda.states + (acc, rej), pda.inputs + tuple(pick.values()), pda.stack_syms,
               pda.bottom, rules)
    out = ProblemInstance(new, GIVEN, frozenset(pda.states), acc, tuple(stack))
    names = {acc: "accept", rej: "reject"}
    names.update({letter: ("announce", q) for q, letter in pick.items()})
    return ReductionOutput(
        out, "homing_to_given", names, ProblemInstance(pda, HOMING, stack=tuple(stack)),
    )


def subset_homing_to_homing(pda: Pda, initial, stack) -> ReductionOutput:
    """The # gadget of subset_to_ada, read as a homing reduction."""
    red = subset_to_ada(pda, initial, stack)
    inst = red.instance
    return ReductionOutput(
        ProblemInstance(inst.pda, HOMING, stack=inst.stack), "subset_homing_to_homing",
        red.name_map,
        ProblemInstance(red.source.pda, SUBSET_HOMING, red.source.initial, stack=tuple(stack)),
    )


# -- witness pull-back ---------------------------------------------------------

def _relabel(node, fn):
    return Node(fn(node.label), node.letter, tuple(_relabel(c, fn) for c in node.children))


def _skip_stutter(node):
    """Splice out steps whose single successor repeats the current label."""
    while len(node.children) == 1 and node.children[0].label == node.label:
        node = node.children[0]
    return Node(node.label, node.letter, tuple(_skip_stutter(c) for c in node.children))


def _cut(node, stop):
    """Turn the first node on each branch satisfying ``stop`` into a leaf."""
    if stop(node.label):
        return Node(node.label)
    if not node.children:
        raise PullBackFailure("branch ends before reaching the source leaf condition")
    return Node(node.label, node.letter, tuple(_cut(c, stop) for c in node.children))


def _drop_root(node, expected):
    node = _skip_stutter(node)
    if len(node.children) != 1 or node.children[0].label != expected:
        raise PullBackFailure("root step does not lead to the source root")
    return node.children[0]


def _project(node, mapping):
    def fn(label):
        try:
            states = frozenset(mapping[q] for q in label.states)
        except KeyError:
            raise PullBackFailure("label leaves the copied state space") from None
        return PseudoConfig(states, label.stack)
    if node.letter is None:
        return Node(fn(node.label))
    return Node(fn(node.label), node.letter, tuple(_project(c, mapping) for c in node.children))


def _project_until(node, mapping, stop):
    """Project labels and stop each branch at the first ``stop`` label."""
    def go(n):
        try:
            states = frozenset(mapping[q] for q in n.label.states)
        except KeyError:
            raise PullBackFailure("label leaves the copied state space") from None
        label = PseudoConfig(states, n.label.stack)
        if stop(label):
            return Node(label)
        if not n.children:
            raise PullBackFailure("branch ends before reaching the source leaf condition")
        return Node(label, n.letter, tuple(go(c) for c in n.children))
    return go(node)


def pull_back_witness(reduction: ReductionOutput, witness: Node, found_target=None):
    """Translate a witness of the reduced instance into one for the source.

    ``found_target`` names the synchronising state for the reduced instance
    when its variant leaves it open (ada/subset).  Returns ``(witness,
    source_target)`` where source_target is the synchronising state of the
    source witness (None for homing and for variants with a fixed target).
    The result is re-validated with check_witness.
    """
    src = reduction.source
    tag = reduction.tag
    pda = src.pda
    bottom = pda.bottom
    names = reduction.name_map
    src_target = None

    if tag in ("subset_to_ada", "subset_homing_to_homing"):
        if witness.is_leaf():
            if len(src.initial) != 1 or witness.label.states != src.initial:
                raise PullBackFailure("single-node witness on a non-trivial instance")
            result = Node(src.root)
        else:
            result = _drop_root(witness, src.root)
        if tag == "subset_to_ada":
            src_target = found_target
    elif tag == "subset_to_given":
        node = _skip_stutter(witness)
        if node.letter is None or names.get(node.letter, ("",))[0] != "decide":
            raise PullBackFailure("root step is not a decide letter")
        s = names[node.letter][1]
        if len(node.children) != 1:
            raise PullBackFailure("decide step branched")
        mapping = {name: role[1] for name, role in names.items()
                   if isinstance(role, tuple) and role[0] == "pair" and role[2] == s}
        result = _project_until(node.children[0], mapping,
                                lambda lab: lab.states == frozenset([s]))
        src_target = s
    elif tag in ("given_to_subset", "given_to_subset_homing"):
        mapping = {name: role[1] for name, role in names.items()
                   if isinstance(role, tuple) and role[0] == "copy"}
        result = _project_until(witness, mapping,
                                lambda lab: lab.states == frozenset([src.target]))
    elif tag == "given_to_super":
        result = _cut(witness, lambda lab: lab.states == frozenset([src.target]))
    elif tag == "super_to_given":
        result = _cut(witness, lambda lab: lab.states == frozenset([src.target])
                      and lab.stack == (bottom,))
    elif tag == "super_to_special":
        result = _drop_root(witness, src.root)
    elif tag == "homing_to_given":
        result = _cut(witness, lambda lab: len(lab.states) == 1
                      and next(iter(lab.states)) in pda.state_index)
    else:
        raise PullBackFailure(f"unknown reduction tag {tag!r}")

    kind = src.witness_kind(src_target)
    if isinstance(kind, Synchroniser) and kind.target is None:
        raise PullBackFailure("source witness target is unknown")
    try:
        verdict = check_witness(pda, src.root, kind, result)
    except Exception as exc:  # MalformedTree, ValidationError
        raise PullBackFailure(f"pulled-back tree is not a witness: {exc}") from None
    if not verdict:
        raise PullBackFailure(f"pulled-back tree is not a witness: {verdict.reason}")
    return result, src_target


REDUCTIONS = {
    "subset_to_ada": subset_to_ada,
    "subset_to_given": subset_to_given,
    "given_to_subset": given_to_subset,
    "given_to_subset_homing": given_to_subset_homing,
    "given_to_super": given_to_super,
    "super_to_given": super_to_given,
    "super_to_special": super_to_special,
    "homing_to_given": homing_to_given,
    "subset_homing_to_homing": subset_homing_to_homing,
}

# (from variant, to variant) -> construction applied to a ProblemInstance
EDGES = {
    (SUBSET, ADA): lambda i: subset_to_ada(i.pda, i.initial, i.stack),
    (SUBSET, GIVEN): lambda i: subset_to_given(i.pda, i.initial, i.stack),
    (GIVEN, SUBSET): lambda i: given_to_subset(i.pda, i.initial, i.target, i.stack),
    (GIVEN, SUBSET_HOMING): lambda i: given_to_subset_homing(i.pda, i.initial, i.target, i.stack),
    (GIVEN, SUPER): lambda i: given_to_super(i.pda, i.initial, i.target, i.stack),
    (SUPER, GIVEN): lambda i: super_to_given(i.pda, i.initial, i.target, i.stack),
    (SUPER, SPECIAL): lambda i: super_to_special(i.pda, i.initial, i.target, i.stack),
    (HOMING, GIVEN): lambda i: homing_to_given(i.pda, i.stack),
    (SUBSET_HOMING, HOMING): lambda i: subset_homing_to_homing(i.pda, i.initial, i.stack),
}


def reduce(instance: ProblemInstance, to_variant: str) -> ReductionOutput:
    variant = SUBSET if instance.variant == ADA else instance.variant
    if variant == SPECIAL:
        variant = SUPER
    step = EDGES.get((variant, to_variant))
    if step is None:
        raise ValidationError(f"no reduction from {instance.variant} to {to_variant}")
    return step(instance)


# Route from each variant down to special-sync.
PIPELINE = {
    ADA: [SUBSET],  # lowered: ada is subset with I = Q
    SUBSET: [GIVEN, SUPER, SPECIAL],
    GIVEN: [SUPER, SPECIAL],
    SUPER: [SPECIAL],
    SPECIAL: [],
    HOMING: [GIVEN, SUPER, SPECIAL],
    SUBSET_HOMING: [HOMING, GIVEN, SUPER, SPECIAL],
}


def lower_to_special(instance: ProblemInstance):
    """Chain of reductions taking ``instance`` to a special-sync instance."""
    chain = []
    current = instance
    if current.variant == ADA:
        current = ProblemInstance(current.pda, SUBSET, current.initial, stack=current.stack)
    if current.variant == SPECIAL:
        return current, chain
    for nxt in PIPELINE[current.variant]:
        red = reduce(current, nxt)
        chain.append(red)
        current = red.instance
    return current, chain
