"""Concrete ASCII syntax for concepts, ontologies and Minsky machines.

Grammar, loosest binding first::

    concept  := impl ('<=>' impl)*          left associative
    impl     := disj ('=>' impl)?           right associative
    disj     := conj ('or' conj)*
    conj     := unary ('and' unary)*
    unary    := 'not' unary | 'some' ROLE '.' unary | 'only' ROLE '.' unary
              | 'some' 'u' '.' unary | 'only' 'u' '.' unary
              | 'some!=' 'u' '.' unary | 'some=1' 'u' '.' unary   (counting mode)
              | 'dia'K unary | 'box'K unary | 'X' unary | 'F' unary | 'G' unary
              | atom
    atom     := CNAME | 'top' | 'bot' | '{' IND '}' | '{' 'iota' concept '}'
              | '(' concept ')'

Quantifiers and modal prefixes bind like negation, so ``some r. A and B``
reads as ``(some r. A) and B``.  ``X`` is ``dia1`` and ``F``/``G`` are
``dia2``/``box2``: modality 1 is the successor relation and modality 2 the
strict order on temporal frames.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (
    CI, FALSUM, And, Concept, Dia, Exists, ExistsDiff, ExistsOne, ExistsU,
    Ind, Iota, Name, Nom, Not, Ontology, bot, box, forall, forall_u, iff,
    implies, or_, top, modal_indices_max,
)

NEXT, FUTURE = 1, 2

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<sym><=>|=>|\[=|some!=|some=1|[{}().])
  | (?P<word>[A-Za-z][A-Za-z0-9_]*)
  | (?P<bad>.)
""", re.VERBOSE)

_KEYWORDS = {"not", "and", "or", "some", "only", "top", "bot", "iota", "u", "X", "F", "G"}
_MODAL = re.compile(r"(dia|box)(\d+)$")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.span = span
        where = f"{span.line}:{span.column}: " if span else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str, line0: int = 1) -> list[Token]:
    out = []
    line, col = line0, 1
    for m in _TOKEN.finditer(text):
        s = m.group(0)
        span = SourceSpan(line, col, len(s))
        kind = m.lastgroup
        if kind == "bad":
            raise ParseError(f"unexpected character {s!r}", span)
        if kind != "ws":
            out.append(Token(kind, s, span))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
    out.append(Token("eof", "", SourceSpan(line, col, 1)))
    return out


class _Parser:
    def __init__(self, tokens: list[Token], counting: bool, modalities: int | None):
        self.toks = tokens
        self.pos = 0
        self.counting = counting
        self.modalities = modalities

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def take(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.span)
        return self.take()

    def concept(self) -> Concept:
        c = self.impl()
        while self.tok.text == "<=>":
            self.take()
            c = iff(c, self.impl())
        return c

    def impl(self) -> Concept:
        c = self.disj()
        if self.tok.text == "=>":
            self.take()
            return implies(c, self.impl())
        return c

    def disj(self) -> Concept:
        c = self.conj()
        while self.tok.text == "or":
            self.take()
            c = or_(c, self.conj())
        return c

    def conj(self) -> Concept:
        c = self.unary()
        while self.tok.text == "and":
            self.take()
            c = And(c, self.unary())
        return c

    def modality(self, t: Token, k: int) -> int:
        if k < 1 or (self.modalities is not None and k > self.modalities):
            raise ParseError(f"unknown modality index {k}", t.span)
        return k

    def role(self) -> str:
        t = self.take()
        if t.kind != "word" or not t.text[0].islower() or (t.text in _KEYWORDS and t.text != "u") \
                or _MODAL.match(t.text):
            raise ParseError(f"expected a role name, found {t.text or 'end of input'!r}", t.span)
        self.expect(".")
        return t.text

    def unary(self) -> Concept:
        t = self.tok
        if t.text == "not":
            self.take()
            return Not(self.unary())
        if t.text in ("some", "only"):
            self.take()
            r = self.role()
            body = self.unary()
            if r == "u":
                return ExistsU(body) if t.text == "some" else forall_u(body)
            return Exists(r, body) if t.text == "some" else forall(r, body)
        if t.text in ("some!=", "some=1"):
            if not self.counting:
                raise ParseError(f"{t.text!r} is only available in counting mode", t.span)
            self.take()
            r = self.role()
            if r != "u":
                raise ParseError("counting quantifiers range over the universal role only", t.span)
            body = self.unary()
            return ExistsDiff(body) if t.text == "some!=" else ExistsOne(body)
        if t.kind == "word":
            m = _MODAL.match(t.text)
            if m:
                self.take()
                k = self.modality(t, int(m.group(2)))
                body = self.unary()
                return Dia(k, body) if m.group(1) == "dia" else box(k, body)
            if t.text in ("X", "F", "G"):
                self.take()
                k = self.modality(t, NEXT if t.text == "X" else FUTURE)
                body = self.unary()
                return box(k, body) if t.text == "G" else Dia(k, body)
        return self.atom()

    def atom(self) -> Concept:
        t = self.take()
        if t.text == "(":
            c = self.concept()
            self.expect(")")
            return c
        if t.text == "top":
            return top()
        if t.text == "bot":
            return bot()
        if t.text == "{":
            if self.tok.text == "iota":
                self.take()
                c = self.concept()
                self.expect("}")
                return Nom(Iota(c))
            n = self.take()
            if n.kind != "word" or not n.text[0].islower() or n.text in _KEYWORDS or _MODAL.match(n.text):
                raise ParseError(f"expected an individual name, found {n.text or 'end of input'!r}", n.span)
            self.expect("}")
            return Nom(Ind(n.text))
        if t.kind == "word" and t.text[0].isupper() and t.text not in _KEYWORDS:
            if t.text == FALSUM:
                raise ParseError(f"{FALSUM!r} is reserved", t.span)
            return Name(t.text)
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.span)


def parse_concept(text: str, counting: bool = False, modalities: int | None = None,
                  line0: int = 1) -> Concept:
    p = _Parser(tokenize(text, line0), counting, modalities)
    c = p.concept()
    if p.tok.kind != "eof":
        raise ParseError(f"unexpected {p.tok.text!r}", p.tok.span)
    return c


@dataclass
class Document:
    """A parsed ``.fdl`` file: CIs plus an optional goal concept."""
    ontology: Ontology
    goal: Concept | None = None
    goals: list = field(default_factory=list)


def _statements(text: str):
    """Split into statements; a statement continues while brackets are open."""
    buf, start, depth = [], None, 0
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.split("#", 1)[0]
        if not line.strip() and depth == 0:
            continue
        if start is None:
            start = lineno
        buf.append(line)
        depth += line.count("(") + line.count("{") - line.count(")") - line.count("}")
        if depth <= 0:
            yield start, "\n".join(buf)
            buf, start, depth = [], None, 0
    if buf:
        yield start, "\n".join(buf)


def parse_document(text: str, counting: bool = False) -> Document:
    mods = None
    cis, goals = [], []
    stmts = list(_statements(text))
    for lineno, s in stmts:
        m = re.match(r"\s*modalities\s*:\s*(\d+)\s*$", s)
        if m:
            mods = int(m.group(1))
    for lineno, s in stmts:
        if re.match(r"\s*modalities\s*:", s):
            continue
        toks = tokenize(s, lineno)
        seps = [k for k, t in enumerate(toks) if t.text == "[="]
        if len(seps) > 1:
            raise ParseError("more than one '[=' in a statement", toks[seps[1]].span)
        p = _Parser(toks, counting, mods)
        lhs = p.concept()
        if seps:
            p.expect("[=")
            rhs = p.concept()
        if p.tok.kind != "eof":
            raise ParseError(f"unexpected {p.tok.text!r}", p.tok.span)
        if seps:
            cis.append(CI(lhs, rhs))
        else:
            goals.append(lhs)
    top_index = max([modal_indices_max(ci.lhs, ci.rhs) for ci in cis]
                    + [modal_indices_max(g) for g in goals] + [1])
    onto = Ontology(tuple(cis), mods if mods is not None else top_index)
    goal = None
    if goals:
        goal = goals[0]
        for g in goals[1:]:
            goal = And(goal, g)
    return Document(onto, goal, goals)


def parse_ontology(text: str, counting: bool = False) -> Ontology:
    return parse_document(text, counting).ontology


# ------------------------------------------------------------- printing

def _match_bot(c) -> bool:
    return isinstance(c, And) and c.left == Name(FALSUM) and c.right == Not(Name(FALSUM))


def print_concept(c: Concept) -> str:
    """Canonical text; binary connectives are always parenthesised."""
    if _match_bot(c):
        return "bot"
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Nom):
        if isinstance(c.term, Ind):
            return "{" + c.term.name + "}"
        return "{iota " + print_concept(c.term.body) + "}"
    if isinstance(c, And):
        l, r = c.left, c.right
        if (isinstance(l, Not) and isinstance(l.arg, And) and isinstance(l.arg.right, Not)
                and r == Not(And(l.arg.right.arg, Not(l.arg.left)))):
            return f"({print_concept(l.arg.left)} <=> {print_concept(l.arg.right.arg)})"
        return f"({print_concept(c.left)} and {print_concept(c.right)})"
    if isinstance(c, Exists):
        return f"some {c.role}. {print_concept(c.arg)}"
    if isinstance(c, ExistsU):
        return f"some u. {print_concept(c.arg)}"
    if isinstance(c, ExistsDiff):
        return f"some!= u. {print_concept(c.arg)}"
    if isinstance(c, ExistsOne):
        return f"some=1 u. {print_concept(c.arg)}"
    if isinstance(c, Dia):
        return f"dia{c.index} {print_concept(c.arg)}"
    # negation: try to re-sugar
    a = c.arg
    if _match_bot(a):
        return "top"
    if isinstance(a, Dia) and isinstance(a.arg, Not):
        return f"box{a.index} {print_concept(a.arg.arg)}"
    if isinstance(a, Exists) and isinstance(a.arg, Not):
        return f"only {a.role}. {print_concept(a.arg.arg)}"
    if isinstance(a, ExistsU) and isinstance(a.arg, Not):
        return f"only u. {print_concept(a.arg.arg)}"
    if isinstance(a, And) and isinstance(a.right, Not):
        if isinstance(a.left, Not):
            return f"({print_concept(a.left.arg)} or {print_concept(a.right.arg)})"
        return f"({print_concept(a.left)} => {print_concept(a.right.arg)})"
    return f"not {print_concept(a)}"


def print_ci(ci: CI) -> str:
    return f"{print_concept(ci.lhs)} [= {print_concept(ci.rhs)}"


def print_ontology(o: Ontology, goal: Concept | None = None) -> str:
    lines = [f"modalities: {o.modality_count}"]
    lines += [print_ci(ci) for ci in o.cis]
    if goal is not None:
        lines.append(print_concept(goal))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------- Minsky machines

def parse_minsky(text: str):
    from .encoders import Dec, Inc, MinskyMachine

    states = None
    instrs: dict[int, object] = {}
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        span = SourceSpan(lineno, 1, len(raw))
        m = re.match(r"states\s*:\s*(.+)$", line)
        if m:
            states = m.group(1).split()
            continue
        if states is None:
            raise ParseError("the 'states:' line must come first", span)
        m = re.match(r"(\d+)\s*:\s*inc\s+r([12])\s*->\s*(\w+)$", line)
        if m:
            instrs[int(m.group(1))] = Inc(int(m.group(2)), _state(states, m.group(3), span))
            continue
        m = re.match(r"(\d+)\s*:\s*dec\s+r([12])\s*->\s*(\w+)\s+else\s+(\w+)$", line)
        if m:
            instrs[int(m.group(1))] = Dec(int(m.group(2)), _state(states, m.group(3), span),
                                          _state(states, m.group(4), span))
            continue
        raise ParseError(f"cannot parse instruction {line!r}", span)
    if states is None:
        raise ParseError("missing 'states:' line")
    n = len(states) - 1
    if sorted(instrs) != list(range(n)):
        raise ParseError(f"expected instructions 0..{n - 1}, found {sorted(instrs)}")
    return MinskyMachine(tuple(states), tuple(instrs[i] for i in range(n)))


def _state(states, name, span) -> int:
    if name not in states:
        raise ParseError(f"unknown state {name!r}", span)
    return states.index(name)


def print_minsky(m) -> str:
    from .encoders import Inc

    lines = ["states: " + " ".join(m.states)]
    for i, ins in enumerate(m.instructions):
        if isinstance(ins, Inc):
            lines.append(f"{i}: inc r{ins.register} -> {m.states[ins.target]}")
        else:
            lines.append(f"{i}: dec r{ins.register} -> {m.states[ins.target_nonzero]} "
                         f"else {m.states[ins.target_zero]}")
    return "\n".join(lines) + "\n"
