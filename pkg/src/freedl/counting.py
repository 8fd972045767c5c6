"""Counting quantifiers ("elsewhere" and "exactly one") and the two
translations between that language and the modal ALCO with the universal role.
"""
from __future__ import annotations

import itertools

from .decide import TypeSpace, alcou_sat, realizes_quasistate, FragmentError
from .reductions import ReductionError, ReductionResult, _split, _join, _supply, _dedup
from .semantics import Evaluator, Interpretation, ResourceError, work_cap
from .syntax import (
    CI, And, Concept, Dia, Exists, ExistsDiff, ExistsOne, ExistsU, Ind, Iota,
    Name, Nom, Not, Ontology, all_paths, box_path, conj, conj_balanced, disj_balanced, forall_u,
    has_counting, iff, implies, nominal, subconcepts_of, top,
)

DEFAULT_COUNTING_CAP = 12


def check_diff_concept(c: Concept) -> Concept:
    """Reject roles, nominals and descriptions; return ``c`` unchanged."""
    for x in subconcepts_of(c):
        if isinstance(x, (Exists, Nom)):
            raise FragmentError(f"not a counting-language concept: {type(x).__name__}")
    return c


def diff_extension(m: Interpretation, w: int, c: Concept) -> frozenset:
    """Extension of ``c`` at world ``w``; the counting clauses are spelled
    out here rather than delegated, so they can be checked against the
    general evaluator."""
    ev = Evaluator(m)
    dom = m.domains[w]
    if isinstance(c, ExistsDiff):
        inner = diff_extension(m, w, c.arg)
        return frozenset(d for d in dom if inner - {d})
    if isinstance(c, ExistsOne):
        inner = diff_extension(m, w, c.arg)
        return dom if len(inner) == 1 else frozenset()
    if isinstance(c, Not):
        return dom - diff_extension(m, w, c.arg)
    if isinstance(c, And):
        return diff_extension(m, w, c.left) & diff_extension(m, w, c.right)
    if isinstance(c, ExistsU):
        return dom if diff_extension(m, w, c.arg) else frozenset()
    if isinstance(c, Dia):
        out = set()
        for v in m.frame.successors(c.index, w):
            out |= diff_extension(m, v, c.arg)
        return frozenset(out) & dom
    return ev.ext(w, c)


def type_concept(t) -> Concept:
    """The conjunction of a type's members (given as a full closure view)."""
    return conj(sorted(t, key=_key))


def _key(c):
    from .parser import print_concept
    return (len(subconcepts_of(c)), print_concept(c))


def quasistate_description(types) -> Concept:
    """Everything is of one of the types, and each type is realized."""
    ts = [type_concept(t) if isinstance(t, (set, frozenset)) else t for t in types]
    if not ts:
        raise ValueError("a quasistate is a nonempty set of types")
    return conj_balanced([forall_u(disj_balanced(ts))] + [ExistsU(t) for t in ts])


# ------------------------------------------------------- counting -> ALCOu

def _expand_one(c: Concept) -> Concept:
    """Rewrite exactly-one in terms of elsewhere, bottom-up."""
    if isinstance(c, (Name, Nom)):
        return c
    if isinstance(c, ExistsOne):
        b = _expand_one(c.arg)
        return ExistsU(And(b, Not(ExistsDiff(b))))
    if isinstance(c, And):
        return And(_expand_one(c.left), _expand_one(c.right))
    if isinstance(c, Exists):
        return Exists(c.role, _expand_one(c.arg))
    if isinstance(c, Dia):
        return Dia(c.index, _expand_one(c.arg))
    return type(c)(_expand_one(c.arg))


class _Elsewhere:
    """Surrogates for non-name bodies and witness nominals for each body."""

    def __init__(self, supply):
        self.supply = supply
        self.surrogate: dict = {}       # body -> Name
        self.witness: dict = {}         # Name -> Nom

    def rewrite(self, c: Concept) -> Concept:
        if isinstance(c, (Name, Nom)):
            return c
        if isinstance(c, ExistsDiff):
            b = self.rewrite(c.arg)
            if not isinstance(b, Name):
                if b not in self.surrogate:
                    self.surrogate[b] = Name(self.supply.numbered("S"))
                b = self.surrogate[b]
            if b not in self.witness:
                self.witness[b] = nominal(self.supply("a_" + b.name))
            a = self.witness[b]
            return And(ExistsU(b), implies(a, ExistsU(And(Not(a), b))))
        if isinstance(c, And):
            return And(self.rewrite(c.left), self.rewrite(c.right))
        if isinstance(c, Exists):
            return Exists(c.role, self.rewrite(c.arg))
        if isinstance(c, Dia):
            return Dia(c.index, self.rewrite(c.arg))
        return type(c)(self.rewrite(c.arg))

    def axioms(self):
        """(lhs, rhs) pairs to hold everywhere."""
        out = []
        for body, s in self.surrogate.items():
            out += [(s, body), (body, s)]
        for b, a in self.witness.items():
            out.append((b, ExistsU(And(a, b))))
        return out


def mldiff_to_mlalcou(x) -> ReductionResult:
    """Replace the counting quantifiers using a fresh witness nominal per
    counted concept.  Accepts a concept, an ontology or a (goal, ontology)
    pair."""
    if isinstance(x, Ontology) or isinstance(x, tuple):
        goal, o, pair = _split(x)
        if not has_counting(o) and (goal is None or not has_counting(goal)):
            return ReductionResult(x, {}, {})
        sup = _supply(o, goal)
        el = _Elsewhere(sup)
        cis = [CI(el.rewrite(_expand_one(ci.lhs)), el.rewrite(_expand_one(ci.rhs))) for ci in o]
        g = el.rewrite(_expand_one(goal)) if goal is not None else None
        cis += [CI(l, r) for l, r in el.axioms()]
        out = Ontology(tuple(_dedup(cis)), o.modality_count)
        return ReductionResult(_join(g, out, pair), _fresh(el), {"counting": "eliminated"})
    c = x
    if not has_counting(c):
        return ReductionResult(c, {}, {})
    el = _Elsewhere(_supply(c))
    main = el.rewrite(_expand_one(c))
    paths = sorted(all_paths(c), key=lambda p: (len(p), p))
    body = [main]
    for l, r in el.axioms():
        for pi in paths:
            body.append(box_path(pi, forall_u(implies(l, r))))
    return ReductionResult(conj(_dedup(body)), _fresh(el), {"counting": "eliminated"})


def _fresh(el):
    out = {s.name: b for b, s in el.surrogate.items()}
    out.update({a.term.name: b for b, a in el.witness.items()})
    return out


# ------------------------------------------------------- ALCOu -> counting

class _Sharp:
    """Abstract nominals and role restrictions into fresh concept names."""

    def __init__(self, supply):
        self.supply = supply
        self.table: dict = {}

    def __call__(self, c: Concept) -> Concept:
        if isinstance(c, Name):
            return c
        if isinstance(c, Nom):
            if isinstance(c.term, Iota):
                raise FragmentError("definite descriptions must be eliminated first")
            return self._name(c, "N_" + c.term.name)
        if isinstance(c, Exists):
            return self._name(c, "E")
        if isinstance(c, And):
            return And(self(c.left), self(c.right))
        if isinstance(c, Dia):
            return Dia(c.index, self(c.arg))
        return type(c)(self(c.arg))

    def _name(self, c, base):
        if c not in self.table:
            self.table[c] = Name(self.supply.numbered(base) if base == "E" else self.supply(base))
        return self.table[c]


def _modal_abstraction(c: Concept, table: dict, supply) -> Concept:
    """Replace outermost modal subconcepts by fresh names."""
    if isinstance(c, Dia):
        if c not in table:
            table[c] = Name(supply.numbered("M"))
        return table[c]
    if isinstance(c, (Name, Nom)):
        return c
    if isinstance(c, And):
        return And(_modal_abstraction(c.left, table, supply), _modal_abstraction(c.right, table, supply))
    if isinstance(c, Exists):
        return Exists(c.role, _modal_abstraction(c.arg, table, supply))
    return type(c)(_modal_abstraction(c.arg, table, supply))


def abstract_description(sp, T, supply=None) -> Concept:
    """Quasistate description of ``T`` with modal members replaced by
    fresh names; modal-free, so ``alcou_sat`` applies."""
    supply = supply or _supply(sp.c0, sp.ontology)
    table: dict = {}
    return quasistate_description([_modal_abstraction(type_concept(sp.render(t)), table, supply)
                                   for t in T])


def realizable_quasistates(goal: Concept, o: Ontology, cap: int = DEFAULT_COUNTING_CAP):
    """Nonempty sets of types that some single ALCOu world realizes,
    where modal members are treated as opaque names.

    :func:`abstract_description` gives the concept whose ``alcou_sat``
    answer this matches; the tests compare the two routes."""
    try:
        sp = TypeSpace(goal, o, cap)
    except Exception as e:
        raise ReductionError("CLOSURE_TOO_LARGE", str(e)) from None
    types = [t for t in sp.all_types if sp.u_local(t) and sp.ci_ok(t)]
    groups: dict = {}
    for t in types:
        groups.setdefault(sp.uprofile(t), []).append(t)
    limit = work_cap()
    spent = 0
    out = []
    for U, grp in sorted(groups.items(), key=lambda kv: sorted(map(str, kv[0]))):
        for r in range(1, len(grp) + 1):
            for T in itertools.combinations(grp, r):
                spent += 1
                if spent > limit:
                    raise ResourceError("quasistate enumeration exceeded the work cap")
                if not _nominals_fit(sp, T):
                    continue
                if realizes_quasistate(sp, T):
                    out.append(T)
    return sp, out


def _nominals_fit(sp, T) -> bool:
    # with total designation each nominal is in exactly one type of T
    return all(sum(1 for t in T if a in sp.noms(t)) == 1 for a in sp.nominals)


def mlalcou_to_mldiff(goal: Concept, o: Ontology, cap: int = DEFAULT_COUNTING_CAP):
    """Return ``(candidates, o2)``: the goal is satisfiable under ``o``
    (total designation) iff some candidate is satisfiable under ``o2``."""
    sp, quasi = realizable_quasistates(goal, o, cap)
    supply = _supply(o, goal)
    sharp = _Sharp(supply)
    cis = [CI(sharp(ci.lhs), sharp(ci.rhs)) for ci in o]
    for a in sp.nominals:
        cis.append(CI(top(), ExistsOne(sharp(nominal(a)))))
    descs = [quasistate_description([sharp(type_concept(sp.render(t))) for t in T]) for T in quasi]
    cis.append(CI(top(), disj_balanced(descs) if descs else Not(top())))
    o2 = Ontology(tuple(_dedup(cis)), o.modality_count)
    cands = [sharp(type_concept(sp.render(t))) for t in sp.all_types
             if sp.u_local(t) and sp.ci_ok(t) and sp.holds(t, goal)]
    return cands, o2
