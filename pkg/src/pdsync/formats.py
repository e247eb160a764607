"""Line-oriented text formats for PDA, AEPS and APS documents.

    pda
    states 1 2 3 4
    inputs box dia
    stack red blue bot
    bottom bot
    trans 1 box red -> 1 eps
    problem special I=1,2,3,4 s=4

A line starting with ``#`` and text after a lone ``#`` are comments.  Stack words are written top-first and ``eps``
denotes the empty word.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .aeps import Aeps, AepsRule, Branch
from .aps import Aps, ApsRule
from .errors import ParseError, ValidationError
from .pda import Pda, Rule
from .reductions import VARIANTS, ProblemInstance

EPS = "eps"


@dataclass(frozen=True)
class Problem:
    variant: str
    initial: Optional[tuple] = None
    target: Optional[str] = None
    stack: Optional[tuple] = None


@dataclass(frozen=True)
class InstanceDocument:
    kind: str  # pda | aeps | aps
    model: object
    problem: Optional[Problem] = None

    def instance(self, variant=None) -> ProblemInstance:
        """Problem instance from the header, optionally overriding the variant."""
        if self.kind != "pda":
            raise ValidationError(f"a {self.kind} document does not describe a PDA problem")
        prob = self.problem or Problem(variant or "special")
        variant = variant or prob.variant
        initial = frozenset(prob.initial) if prob.initial is not None else None
        if initial is None and variant not in ("ada", "homing"):
            initial = frozenset(self.model.states)
        return ProblemInstance(self.model, variant, initial, prob.target, prob.stack)


def _tokens(line):
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _word(tokens, lineno):
    names = [t for t, _ in tokens]
    if names == [EPS]:
        return ()
    if EPS in names:
        col = tokens[names.index(EPS)][1]
        raise ParseError("'eps' cannot be mixed with stack letters", lineno, col)
    return tuple(names)


def _problem(tokens, lineno):
    if len(tokens) < 2:
        raise ParseError("problem line needs a variant", lineno, tokens[0][1])
    variant, col = tokens[1]
    if variant not in VARIANTS:
        raise ParseError(f"unknown variant {variant!r}", lineno, col)
    fields = {}
    for tok, col in tokens[2:]:
        key, sep, value = tok.partition("=")
        if not sep or key not in ("I", "s", "gamma") or key in fields:
            raise ParseError(f"bad problem field {tok!r}", lineno, col)
        fields[key] = tuple(v for v in value.split(",") if v)
    initial = fields.get("I")
    target = fields.get("s")
    if target is not None:
        if len(target) != 1:
            raise ParseError("s names exactly one state", lineno, 1)
        target = target[0]
    return Problem(variant, initial, target, fields.get("gamma"))


# A comment is a line starting with '#' or a '#' standing alone as a token;
# fresh symbols such as '#t:0:1' are not comments.
_COMMENT = re.compile(r"^\s*#.*$|(?:^|\s)#(?:\s.*)?$")


def _split_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw)
        if line.strip():
            yield lineno, line


_SINGLE = {"bottom", "init", "fin"}
_LISTS = {"states", "inputs", "stack", "vars"}
_ALLOWED = {
    "pda": {"states", "inputs", "stack", "bottom", "trans", "problem"},
    "aeps": {"states", "vars", "stack", "bottom", "init", "fin", "rule"},
    "aps": {"states", "stack", "bottom", "init", "fin", "rule"},
}
_REQUIRED = {
    "pda": ("states", "inputs", "stack", "bottom"),
    "aeps": ("states", "stack", "bottom", "init", "fin"),
    "aps": ("states", "stack", "bottom", "init", "fin"),
}

_BRANCH = re.compile(r"^\(\s*([^,()\s]+)\s*,\s*([^,()\[\]]*?)\s*(?:,\s*\[([^\]]*)\]\s*)?\)$")


def _bit(text, lineno, col):
    if text not in ("0", "1"):
        raise ParseError(f"expected a bit, found {text!r}", lineno, col)
    return int(text)


def _parse_branches(body, lineno, col, with_commands):
    out = []
    for part in body.split(";"):
        part = part.strip()
        m = _BRANCH.match(part)
        if not m:
            raise ParseError(f"malformed branch {part!r}", lineno, col)
        dst, push, cmd = m.group(1), m.group(2), m.group(3)
        word = _word(_tokens(push), lineno) if push.strip() else None
        if word is None:
            raise ParseError("branch needs a push word (use 'eps')", lineno, col)
        if cmd is not None and not with_commands:
            raise ParseError("APS branches carry no command", lineno, col)
        command = []
        for tok in (cmd or "").replace(",", " ").split():
            var, sep, bit = tok.partition(":=")
            if not sep:
                raise ParseError(f"bad command {tok!r}", lineno, col)
            command.append((var, _bit(bit, lineno, col)))
        out.append((dst, word, tuple(command)))
    return out


def parse_instance(text: str) -> InstanceDocument:
    lines = list(_split_lines(text))
    if not lines:
        raise ParseError("empty document", 1, 1)
    lineno, line = lines[0]
    toks = _tokens(line)
    kind = toks[0][0]
    if kind not in _ALLOWED or len(toks) != 1:
        raise ParseError("document must start with 'pda', 'aeps' or 'aps'", lineno, toks[0][1])
    decl = {}
    rules = []
    problem = None
    for lineno, line in lines[1:]:
        toks = _tokens(line)
        key, col = toks[0]
        if key not in _ALLOWED[kind]:
            raise ParseError(f"unexpected keyword {key!r} in a {kind} document", lineno, col)
        if key in _LISTS or key in _SINGLE:
            if key in decl:
                raise ParseError(f"duplicate '{key}' line", lineno, col)
            values = tuple(t for t, _ in toks[1:])
            if key in _SINGLE and len(values) != 1:
                raise ParseError(f"'{key}' takes exactly one name", lineno, col)
            if len(set(values)) != len(values):
                raise ParseError(f"repeated name in '{key}'", lineno, col)
            decl[key] = values
        elif key == "problem":
            if problem is not None:
                raise ParseError("duplicate problem line", lineno, col)
            problem = _problem(toks, lineno)
        elif key == "trans":
            names = [t for t, _ in toks]
            if len(names) < 6 or names[4] != "->":
                raise ParseError("expected 'trans <src> <letter> <pop> -> <dst> <push|eps>'",
                                 lineno, col)
            if len(toks) == 6:
                raise ParseError("missing push word (use 'eps')", lineno, len(line) + 1)
            rules.append((lineno, col, Rule(names[1], names[2], names[3], names[5],
                                            _word(toks[6:], lineno))))
        else:  # rule
            head, arrow, body = line.partition("->")
            if not arrow:
                raise ParseError("expected '->' in rule", lineno, col)
            htoks = _tokens(head)[1:]
            if len(htoks) < 2:
                raise ParseError("rule needs a source state and a popped letter", lineno, col)
            guard = []
            for tok, tcol in htoks[2:]:
                if kind != "aeps":
                    raise ParseError("APS rules carry no guard", lineno, tcol)
                var, sep, bit = tok.partition("?=")
                if not sep:
                    raise ParseError(f"bad test {tok!r}", lineno, tcol)
                guard.append((var, _bit(bit, lineno, tcol)))
            branches = _parse_branches(body, lineno, len(head) + 3, kind == "aeps")
            rules.append((lineno, col, (htoks[0][0], htoks[1][0], guard, branches)))
    for key in _REQUIRED[kind]:
        if key not in decl:
            raise ParseError(f"missing '{key}' line", lines[-1][0] + 1, 1)

    bottom = decl["bottom"][0]
    stack = decl["stack"]
    if bottom not in stack:
        stack = stack + (bottom,)
    try:
        if kind == "pda":
            model = Pda(decl["states"], decl["inputs"], stack, bottom, tuple(r for *_, r in rules))
        elif kind == "aeps":
            model = Aeps(
                decl["states"], decl.get("vars", ()), stack, bottom,
                tuple(AepsRule(src, pop, frozenset(g), tuple(Branch(*b) for b in brs))
                      for *_, (src, pop, g, brs) in rules),
                decl["init"][0], decl["fin"][0],
            )
        else:
            model = Aps(
                decl["states"], stack, bottom,
                tuple(ApsRule(src, pop, tuple((d, w) for d, w, _ in brs))
                      for *_, (src, pop, _, brs) in rules),
                decl["init"][0], decl["fin"][0],
            )
    except ValidationError:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        raise ValidationError(str(exc)) from None
    return InstanceDocument(kind, model, problem)


def load_instance(path) -> InstanceDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- formatting ----------------------------------------------------------------

def _w(word):
    return " ".join(word) if word else EPS


def format_problem(inst: ProblemInstance) -> str:
    parts = ["problem", inst.variant]
    if inst.variant not in ("ada", "homing"):
        parts.append("I=" + ",".join(inst.pda.sorted_states(inst.initial)))
    if inst.target is not None:
        parts.append(f"s={inst.target}")
    if inst.stack != (inst.pda.bottom,):
        parts.append("gamma=" + ",".join(inst.stack))
    return " ".join(parts)


def format_pda(pda: Pda, problem: Optional[ProblemInstance] = None) -> str:
    lines = [
        "pda",
        "states " + " ".join(pda.states),
        "inputs " + " ".join(pda.inputs),
        "stack " + " ".join(pda.stack_syms),
        "bottom " + pda.bottom,
    ]
    for r in pda.rules:
        lines.append(f"trans {r.src} {r.letter} {r.pop} -> {r.dst} {_w(r.push)}")
    if problem is not None:
        lines.append(format_problem(problem))
    return "\n".join(lines) + "\n"


def format_aeps(aeps: Aeps) -> str:
    lines = [
        "aeps",
        "states " + " ".join(aeps.states),
        "vars " + " ".join(aeps.vars),
        "stack " + " ".join(aeps.stack_syms),
        "bottom " + aeps.bottom,
        "init " + aeps.init,
        "fin " + aeps.fin,
    ]
    for r in aeps.rules:
        guard = "".join(f" {v}?={b}" for v, b in sorted(r.guard))
        branches = " ; ".join(
            f"({br.dst}, {_w(br.push)}, [{' '.join(f'{v}:={b}' for v, b in br.command)}])"
            for br in r.branches
        )
        lines.append(f"rule {r.src} {r.pop}{guard} -> {branches}")
    return "\n".join(lines) + "\n"


def _aps_name(q):
    if isinstance(q, frozenset):
        return "{" + "|".join(sorted(q)) + "}"
    return str(q)


def format_aps(aps: Aps) -> str:
    name = _aps_name
    lines = [
        "aps",
        "states " + " ".join(name(q) for q in aps.states),
        "stack " + " ".join(aps.stack_syms),
        "bottom " + aps.bottom,
        "init " + name(aps.init),
        "fin " + name(aps.fin),
    ]
    for r in aps.rules:
        branches = " ; ".join(f"({name(d)}, {_w(w)})" for d, w in r.branches)
        lines.append(f"rule {name(r.src)} {r.pop} -> {branches}")
    return "\n".join(lines) + "\n"
