"""Strategy trees: synchronisers, super-synchronisers and homing words."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import MalformedTree, ParseError, ValidationError
from .pda import Pda, PseudoConfig, succ


@dataclass(frozen=True)
class Node:
    label: PseudoConfig
    letter: Optional[str] = None
    children: tuple = ()

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))

    def is_leaf(self):
        return not self.children

    def walk(self, path=()):
        yield path, self
        for i, child in enumerate(self.children):
            yield from child.walk(path + (i,))

    def size(self):
        return sum(1 for _ in self.walk())

    def depth(self):
        return 1 + max((c.depth() for c in self.children), default=0)

    def leaves(self):
        return [node for _, node in self.walk() if node.is_leaf()]


# A strategy tree is represented by its root node.
StrategyTree = Node


@dataclass(frozen=True)
class Synchroniser:
    target: str


@dataclass(frozen=True)
class SuperSynchroniser:
    target: str


@dataclass(frozen=True)
class HomingWord:
    pass


@dataclass(frozen=True)
class Verdict:
    ok: bool
    path: Optional[tuple] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def leaf_ok(pda: Pda, kind, label: PseudoConfig) -> bool:
    if len(label.states) != 1:
        return False
    (q,) = label.states
    if isinstance(kind, HomingWord):
        return True
    if q != kind.target:
        return False
    if isinstance(kind, SuperSynchroniser):
        return label.stack == (pda.bottom,)
    return True


def check_witness(pda: Pda, root_pc: PseudoConfig, kind, tree: Node) -> Verdict:
    """Validate ``tree`` as a witness of ``kind`` from ``root_pc``.

    Structural defects (a missing letter, a child count that disagrees with
    the successor set) raise MalformedTree; semantic violations are returned
    as a failing verdict carrying the path of the first offending node.
    """
    if not isinstance(kind, HomingWord) and kind.target not in pda.state_index:
        raise ValidationError(f"target state {kind.target!r} is not a state of the PDA")
    if tree.label != root_pc:
        return Verdict(False, (), "root label differs from the requested root")
    stack = [((), tree)]
    while stack:
        path, node = stack.pop()
        try:
            pda.check_pseudo_config(node.label)
        except ValidationError as exc:
            return Verdict(False, path, str(exc))
        if node.is_leaf():
            if node.letter is not None:
                raise MalformedTree("leaf carries an outgoing letter", path)
            if not leaf_ok(pda, kind, node.label):
                return Verdict(False, path, "leaf label does not satisfy the witness condition")
            continue
        if node.letter is None:
            raise MalformedTree("internal node has no outgoing letter", path)
        if node.letter not in pda.input_index:
            raise MalformedTree(f"unknown input letter {node.letter!r}", path)
        expected = succ(pda, node.label, node.letter)
        if len(expected) != len(node.children):
            raise MalformedTree(
                f"{len(node.children)} children but {len(expected)} successors", path
            )
        for i, (want, child) in enumerate(zip(expected, node.children)):
            if child.label != want:
                return Verdict(False, path + (i,), "child label differs from the successor")
        for i in reversed(range(len(node.children))):
            stack.append((path + (i,), node.children[i]))
    return Verdict(True)


def build_tree(pda: Pda, label: PseudoConfig, choose) -> Node:
    """Unfold a strategy: ``choose(label)`` returns a letter or None for a leaf."""
    letter = choose(label)
    if letter is None:
        return Node(label)
    return Node(label, letter, tuple(build_tree(pda, c, choose) for c in succ(pda, label, letter)))


# -- text format -----------------------------------------------------------
#
#   <indent><letter?> {s1,s2} | <stack top-first>
#
# Two spaces of indentation per depth level; the letter is present exactly on
# internal nodes.

def _format_states(states, order=None):
    names = order(states) if order else sorted(states)
    return "{" + ",".join(names) + "}"


def serialize_tree(tree: Node, order=None) -> str:
    lines = []

    def emit(node, depth):
        head = "  " * depth
        if node.letter is not None:
            head += node.letter + " "
        lines.append(f"{head}{_format_states(node.label.states, order)} | {' '.join(node.label.stack)}")
        for child in node.children:
            emit(child, depth + 1)

    emit(tree, 0)
    return "\n".join(lines) + "\n"


def _parse_tree_line(text, lineno):
    stripped = text.lstrip(" ")
    indent = len(text) - len(stripped)
    if indent % 2:
        raise ParseError("indentation must be a multiple of two spaces", lineno, indent + 1)
    lbrace = stripped.find("{")
    rbrace = stripped.find("}")
    if lbrace < 0 or rbrace < lbrace:
        raise ParseError("expected a state set in braces", lineno, indent + 1)
    letter = stripped[:lbrace].strip() or None
    if letter is not None and " " in letter:
        raise ParseError("more than one letter before the state set", lineno, indent + 1)
    states = [s.strip() for s in stripped[lbrace + 1:rbrace].split(",") if s.strip()]
    rest = stripped[rbrace + 1:].strip()
    if not rest.startswith("|"):
        raise ParseError("expected '|' before the stack word", lineno, indent + rbrace + 2)
    stack = tuple(rest[1:].split())
    try:
        label = PseudoConfig(frozenset(states), stack)
    except ValidationError as exc:
        raise ParseError(str(exc), lineno, indent + 1) from None
    return indent // 2, letter, label


def deserialize_tree(text: str) -> Node:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        entries.append((lineno,) + _parse_tree_line(line, lineno))
    if not entries:
        raise ParseError("empty tree document", 1, 1)

    pos = 0

    def parse(depth):
        nonlocal pos
        lineno, d, letter, label = entries[pos]
        if d != depth:
            raise ParseError(f"expected depth {depth}, found {d}", lineno, 1)
        pos += 1
        children = []
        while pos < len(entries) and entries[pos][1] > depth:
            if entries[pos][1] != depth + 1:
                raise ParseError("indentation skips a level", entries[pos][0], 1)
            children.append(parse(depth + 1))
        if letter is not None and not children:
            raise ParseError(f"node declares letter {letter!r} but has no children", lineno, 1)
        if letter is None and children:
            raise ParseError("node has children but declares no letter", lineno, 1)
        return Node(label, letter, tuple(children))

    root = parse(0)
    if pos != len(entries):
        raise ParseError("more than one root", entries[pos][0], 1)
    return root


def tree_to_dot(tree: Node, order=None) -> str:
    lines = ["digraph witness {", "  node [shape=box];"]
    for path, node in tree.walk():
        name = "n" + "_".join(map(str, path))
        label = f"{_format_states(node.label.states, order)} / {' '.join(node.label.stack)}"
        lines.append(f'  {name} [label="{label}"];')
        for i, _ in enumerate(node.children):
            child = "n" + "_".join(map(str, path + (i,)))
            lines.append(f'  {name} -> {child} [label="{node.letter}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
