"""Abstract syntax for modal description logics with definite descriptions.

Concepts are immutable, hashable values.  Derived operators (top, bottom,
disjunction, implication, universal restrictions, boxes) are expanded into
the core constructors when built, so every function in the package only
has to handle the core.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

# Reserved concept name used to express bottom as ``Falsum and not Falsum``.
FALSUM = "Falsum"


# ---------------------------------------------------------------- terms

@dataclass(frozen=True, slots=True)
class Ind:
    """An individual name."""
    name: str


@dataclass(frozen=True, slots=True)
class Iota:
    """A definite description ``iota body``."""
    body: "Concept"


Term = Union[Ind, Iota]


# ------------------------------------------------------------- concepts

@dataclass(frozen=True, slots=True)
class Name:
    name: str


@dataclass(frozen=True, slots=True)
class Nom:
    term: Term


@dataclass(frozen=True, slots=True)
class Not:
    arg: "Concept"


@dataclass(frozen=True, slots=True)
class And:
    left: "Concept"
    right: "Concept"


@dataclass(frozen=True, slots=True)
class Exists:
    role: str
    arg: "Concept"


@dataclass(frozen=True, slots=True)
class ExistsU:
    arg: "Concept"


@dataclass(frozen=True, slots=True)
class Dia:
    index: int
    arg: "Concept"


@dataclass(frozen=True, slots=True)
class ExistsDiff:
    """Elsewhere quantifier: some *other* element satisfies ``arg``."""
    arg: "Concept"


@dataclass(frozen=True, slots=True)
class ExistsOne:
    """Exactly one element satisfies ``arg``."""
    arg: "Concept"


Concept = Union[Name, Nom, Not, And, Exists, ExistsU, Dia, ExistsDiff, ExistsOne]

_UNARY = (Not, ExistsU, ExistsDiff, ExistsOne)


@dataclass(frozen=True, slots=True)
class CI:
    lhs: Concept
    rhs: Concept


@dataclass(frozen=True)
class Ontology:
    cis: tuple[CI, ...] = ()
    modality_count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "cis", tuple(self.cis))
        top = max((modal_indices_max(ci.lhs, ci.rhs) for ci in self.cis), default=0)
        if top > self.modality_count:
            raise ValueError(f"modality index {top} exceeds declared count {self.modality_count}")

    def __iter__(self) -> Iterator[CI]:
        return iter(self.cis)

    def __len__(self) -> int:
        return len(self.cis)

    def extend(self, extra: Iterable[CI]) -> "Ontology":
        return Ontology(self.cis + tuple(extra), self.modality_count)


@dataclass(frozen=True)
class Signature:
    concept_names: frozenset = frozenset()
    role_names: frozenset = frozenset()
    individual_names: frozenset = frozenset()

    def __or__(self, other: "Signature") -> "Signature":
        return Signature(self.concept_names | other.concept_names,
                         self.role_names | other.role_names,
                         self.individual_names | other.individual_names)

    def all_names(self) -> frozenset:
        return self.concept_names | self.role_names | self.individual_names


ModalPath = tuple  # tuple[int, ...]


# ------------------------------------------------------------ sugar

def bot() -> Concept:
    f = Name(FALSUM)
    return And(f, Not(f))


def top() -> Concept:
    return Not(bot())


def or_(a: Concept, b: Concept) -> Concept:
    return Not(And(Not(a), Not(b)))


def implies(a: Concept, b: Concept) -> Concept:
    return Not(And(a, Not(b)))


def iff(a: Concept, b: Concept) -> Concept:
    return And(implies(a, b), implies(b, a))


def forall(role: str, c: Concept) -> Concept:
    return Not(Exists(role, Not(c)))


def forall_u(c: Concept) -> Concept:
    return Not(ExistsU(Not(c)))


def box(i: int, c: Concept) -> Concept:
    return Not(Dia(i, Not(c)))


def nominal(a: str) -> Concept:
    return Nom(Ind(a))


def iota(c: Concept) -> Concept:
    return Nom(Iota(c))


def conj(cs: Iterable[Concept]) -> Concept:
    """Right-nested conjunction; the empty conjunction is top."""
    cs = list(cs)
    if not cs:
        return top()
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = And(c, out)
    return out


def disj(cs: Iterable[Concept]) -> Concept:
    cs = list(cs)
    if not cs:
        return bot()
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = or_(c, out)
    return out


def _balanced(cs: list, join) -> Concept:
    if len(cs) == 1:
        return cs[0]
    mid = len(cs) // 2
    return join(_balanced(cs[:mid], join), _balanced(cs[mid:], join))


def conj_balanced(cs: Iterable[Concept]) -> Concept:
    """Like :func:`conj` but with logarithmic nesting depth, for long lists."""
    cs = list(cs)
    return _balanced(cs, And) if cs else top()


def disj_balanced(cs: Iterable[Concept]) -> Concept:
    cs = list(cs)
    return _balanced(cs, or_) if cs else bot()


def is_bot(c: Concept) -> bool:
    return c == bot()


def is_top(c: Concept) -> bool:
    return c == top()


# ------------------------------------------------------------ traversal

def children(c: Concept) -> tuple[Concept, ...]:
    if isinstance(c, Name):
        return ()
    if isinstance(c, Nom):
        return (c.term.body,) if isinstance(c.term, Iota) else ()
    if isinstance(c, And):
        return (c.left, c.right)
    return (c.arg,)


def subconcepts(c: Concept) -> frozenset:
    out: set = set()
    stack = [c]
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out.add(x)
        stack.extend(children(x))
    return frozenset(out)


def subconcepts_of(x) -> frozenset:
    """Subconcepts of a concept, CI or ontology."""
    out: set = set()
    for c in _concepts_in(x):
        out |= subconcepts(c)
    return frozenset(out)


def _concepts_in(x) -> list:
    if isinstance(x, CI):
        return [x.lhs, x.rhs]
    if isinstance(x, Ontology):
        return [c for ci in x.cis for c in (ci.lhs, ci.rhs)]
    if isinstance(x, (list, tuple)):
        return [c for y in x for c in _concepts_in(y)]
    return [x]


def modal_depth(x) -> int:
    if isinstance(x, (CI, Ontology, list, tuple)):
        return max((modal_depth(c) for c in _concepts_in(x)), default=0)
    return _md(x)


def _md(c: Concept) -> int:
    if isinstance(c, Dia):
        return _md(c.arg) + 1
    return max((_md(k) for k in children(c)), default=0)


def modal_indices(x) -> frozenset:
    return frozenset(c.index for c in subconcepts_of(x) if isinstance(c, Dia))


def modal_indices_max(*cs: Concept) -> int:
    return max(modal_indices(list(cs)), default=0)


def size(c: Concept) -> int:
    return 1 + sum(size(k) for k in children(c))


def closure(x) -> frozenset:
    """Subconcepts closed under single negation."""
    sub = subconcepts_of(x)
    return frozenset(sub | {Not(c) for c in sub if not isinstance(c, Not)})


def negate(c: Concept) -> Concept:
    """Single negation: strips a leading negation instead of doubling it."""
    return c.arg if isinstance(c, Not) else Not(c)


def signature(x) -> Signature:
    cn, rn, inds = set(), set(), set()
    for c in subconcepts_of(x):
        if isinstance(c, Name) and c.name != FALSUM:
            cn.add(c.name)
        elif isinstance(c, Exists):
            rn.add(c.role)
        elif isinstance(c, Nom) and isinstance(c.term, Ind):
            inds.add(c.term.name)
    return Signature(frozenset(cn), frozenset(rn), frozenset(inds))


def individuals(x) -> list[str]:
    return sorted(signature(x).individual_names)


# -------------------------------------------------------- fragment checks

def has_iota(x) -> bool:
    return any(isinstance(c, Nom) and isinstance(c.term, Iota) for c in subconcepts_of(x))


def has_u(x) -> bool:
    return any(isinstance(c, (ExistsU, ExistsDiff, ExistsOne)) for c in subconcepts_of(x))


def has_counting(x) -> bool:
    return any(isinstance(c, (ExistsDiff, ExistsOne)) for c in subconcepts_of(x))


def has_nominals(x) -> bool:
    return any(isinstance(c, Nom) and isinstance(c.term, Ind) for c in subconcepts_of(x))


def has_roles(x) -> bool:
    return any(isinstance(c, Exists) for c in subconcepts_of(x))


def is_diff_concept(x) -> bool:
    """Names, negation, conjunction, u, elsewhere, counting and diamonds only."""
    ok = (Name, Not, And, ExistsU, ExistsDiff, ExistsOne, Dia)
    return all(isinstance(c, ok) for c in subconcepts_of(x))


def is_next_only(x, nxt: int = 1) -> bool:
    return all(c.index == nxt for c in subconcepts_of(x) if isinstance(c, Dia))


# ------------------------------------------------------------- paths

def relevant_paths(d: Concept, b: Concept) -> frozenset:
    """Sequences of modal indices under which ``b`` occurs in ``d``."""
    if d == b:
        return frozenset({()})
    if isinstance(d, Dia):
        return frozenset((d.index,) + p for p in relevant_paths(d.arg, b))
    out: set = set()
    for k in children(d):
        out |= relevant_paths(k, b)
    return frozenset(out)


def all_paths(d: Concept) -> frozenset:
    """Union of relevant paths over every subconcept; prefix closed."""
    out = {()}
    if isinstance(d, Dia):
        out |= {(d.index,) + p for p in all_paths(d.arg)}
    else:
        for k in children(d):
            out |= all_paths(k)
    return frozenset(out)


def prefix_closure(paths: Iterable[tuple]) -> frozenset:
    return frozenset(p[:k] for p in paths for k in range(len(p) + 1))


def box_path(pi: tuple, e: Concept) -> Concept:
    for i in reversed(pi):
        e = box(i, e)
    return e


def sort_paths(paths: Iterable[tuple]) -> list[tuple]:
    return sorted(paths, key=lambda p: (len(p), p))


# --------------------------------------------------------- substitution

def substitute(d: Concept, c: Concept, a: Concept) -> Concept:
    """Replace every occurrence of ``c`` in ``d`` by ``a``."""
    return map_concept(d, lambda x: a if x == c else None)


def map_concept(d: Concept, fn) -> Concept:
    """Top-down rewrite: ``fn`` returns a replacement or None to recurse."""
    r = fn(d)
    if r is not None:
        return r
    if isinstance(d, Name):
        return d
    if isinstance(d, Nom):
        if isinstance(d.term, Iota):
            return Nom(Iota(map_concept(d.term.body, fn)))
        return d
    if isinstance(d, And):
        return And(map_concept(d.left, fn), map_concept(d.right, fn))
    if isinstance(d, Exists):
        return Exists(d.role, map_concept(d.arg, fn))
    if isinstance(d, Dia):
        return Dia(d.index, map_concept(d.arg, fn))
    return type(d)(map_concept(d.arg, fn))


def map_ontology(o: Ontology, fn) -> Ontology:
    return Ontology(tuple(CI(fn(ci.lhs), fn(ci.rhs)) for ci in o.cis), o.modality_count)


# ----------------------------------------------------------- assertions

def desugar_assertion(kind: str, *args) -> Concept:
    """``C(t)`` becomes ``some u.({t} and C)``; ``r(t1, t2)`` becomes
    ``some u.({t1} and some r.{t2})``.  Terms are ``Ind``/``Iota`` values
    or plain strings naming individuals."""
    def term(t):
        return Nom(Ind(t)) if isinstance(t, str) else Nom(t)
    if kind == "concept":
        c, t = args
        return ExistsU(And(term(t), c))
    if kind == "role":
        r, t1, t2 = args
        return ExistsU(And(term(t1), Exists(r, term(t2))))
    raise ValueError(f"unknown assertion kind {kind!r}")


# ---------------------------------------------------------- fresh names

def fresh_name(base: str, sig) -> str:
    """First of ``base``, ``base_1``, ``base_2``, ... not used in ``sig``."""
    used = sig.all_names() if isinstance(sig, Signature) else set(sig)
    if base not in used:
        return base
    k = 1
    while f"{base}_{k}" in used:
        k += 1
    return f"{base}_{k}"


class NameSupply:
    """Deterministic fresh-name generator that remembers what it issued."""

    def __init__(self, *sources):
        self.used: set = {FALSUM}
        for s in sources:
            self.reserve(s)

    def reserve(self, x) -> None:
        if isinstance(x, Signature):
            self.used |= x.all_names()
        elif isinstance(x, str):
            self.used.add(x)
        else:
            self.used |= signature(x).all_names()

    def __call__(self, base: str) -> str:
        n = fresh_name(base, self.used)
        self.used.add(n)
        return n

    def numbered(self, base: str) -> str:
        """First of ``base_1``, ``base_2``, ... not yet used."""
        k = 1
        while f"{base}_{k}" in self.used:
            k += 1
        n = f"{base}_{k}"
        self.used.add(n)
        return n
