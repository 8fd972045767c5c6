"""Satisfiability-preserving transformations between logic variants.

Every public reduction returns a :class:`ReductionResult`.  Ontology-level
reductions accept either a bare :class:`Ontology` or a ``(goal, ontology)``
pair; a pair comes back as a pair with the goal rewritten consistently.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    CI, And, Concept, Dia, Exists, ExistsU, Ind, Iota, Name, NameSupply, Nom,
    Not, Ontology, all_paths, bot, box, box_path, conj, forall_u, has_iota,
    iff, implies, individuals, is_bot, is_top, map_concept, nominal,
    prefix_closure, relevant_paths, signature, sort_paths, substitute, top,
)


class ReductionError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class ReductionResult:
    output: object
    fresh: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)


def _split(x):
    """Return (goal or None, ontology, was_pair)."""
    if isinstance(x, tuple):
        goal, o = x
        return goal, o, True
    return None, x, False


def _join(goal, o, pair):
    return (goal, o) if pair else o


def _supply(*xs) -> NameSupply:
    s = NameSupply()
    for x in xs:
        if x is not None:
            s.reserve(x)
    return s


def _goal_inds(goal, o) -> list[str]:
    return individuals([o] + ([goal] if goal is not None else []))


# ------------------------------------------------------------------ RDA

def enforce_rda_ontology(x) -> ReductionResult:
    """Add ``{a} [= box_i {a}`` for every individual and modality."""
    goal, o, pair = _split(x)
    extra = [CI(nominal(a), box(i, nominal(a)))
             for a in _goal_inds(goal, o) for i in range(1, o.modality_count + 1)]
    return ReductionResult(_join(goal, o.extend(extra), pair), {},
                           {"rda": "rda -> none"})


def enforce_rda_concept_total(c: Concept, designation: str = "total") -> Concept:
    """Concept-level RDA elimination; only sound under total designation."""
    if designation != "total":
        raise ReductionError(
            "PARTIAL_MODE",
            "concept-level RDA elimination is unsound under partial designation")
    extra = []
    for a in individuals(c):
        na = nominal(a)
        for p in sort_paths(prefix_closure(relevant_paths(c, na))):
            if p:
                extra.append(box_path(p[:-1], forall_u(implies(na, box(p[-1], na)))))
    return conj([c] + _dedup(extra)) if extra else c


def _dedup(xs):
    seen, out = set(), []
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


# ------------------------------------------------ partial versus total

def totalize_ontology(x) -> ReductionResult:
    """Total-mode input to partial-mode output: every name must denote."""
    goal, o, pair = _split(x)
    extra = [CI(top(), ExistsU(nominal(a))) for a in _goal_inds(goal, o)]
    return ReductionResult(_join(goal, o.extend(extra), pair), {},
                           {"designation": "total -> partial"})


def totalize_concept(c: Concept) -> ReductionResult:
    extra = []
    for a in individuals(c):
        for p in sort_paths(relevant_paths(c, nominal(a))):
            extra.append(box_path(p, ExistsU(nominal(a))))
    out = conj([c] + _dedup(extra)) if extra else c
    return ReductionResult(out, {}, {"designation": "total -> partial"})


def _replace_nominals(c: Concept, table: dict, make) -> Concept:
    def fn(y):
        if isinstance(y, Nom) and isinstance(y.term, Ind) and y.term.name in table:
            return make(table[y.term.name])
        return None
    return map_concept(c, fn)


def partialize_ontology(x) -> ReductionResult:
    """Partial-mode input to total-mode output via guarded surrogates N_a."""
    goal, o, pair = _split(x)
    supply = _supply(o, goal)
    table = {a: supply("N_" + a) for a in _goal_inds(goal, o)}
    rep = lambda c: _replace_nominals(c, table, Name)
    cis = [CI(rep(ci.lhs), rep(ci.rhs)) for ci in o]
    cis += [CI(Name(n), nominal(a)) for a, n in table.items()]
    out = Ontology(cis, o.modality_count)
    g = rep(goal) if goal is not None else None
    return ReductionResult(_join(g, out, pair), {n: a for a, n in table.items()},
                           {"designation": "partial -> total"})


def partialize_concept(c: Concept) -> ReductionResult:
    supply = _supply(c)
    table = {a: supply("N_" + a) for a in individuals(c)}
    body = _replace_nominals(c, table, Name)
    extra = []
    for a, n in table.items():
        for p in sort_paths(relevant_paths(c, nominal(a))):
            extra.append(box_path(p, forall_u(implies(Name(n), nominal(a)))))
    return ReductionResult(conj([body] + _dedup(extra)), {n: a for a, n in table.items()},
                           {"designation": "partial -> total"})


# -------------------------------------------------------- normal form

def is_atom(c: Concept) -> bool:
    return isinstance(c, Name) or is_top(c) or is_bot(c)


def is_shape(c: Concept) -> bool:
    """A single connective applied to atoms."""
    if is_atom(c):
        return False
    if isinstance(c, Nom):
        return isinstance(c.term, Ind) or is_atom(c.term.body)
    if isinstance(c, And):
        return is_atom(c.left) and is_atom(c.right)
    return is_atom(c.arg)


def is_normal_ci(ci: CI) -> bool:
    l, r = ci.lhs, ci.rhs
    if is_atom(l) and is_atom(r):
        return True
    return (isinstance(l, Name) and is_shape(r)) or (is_shape(l) and isinstance(r, Name))


def is_normal_ontology(o: Ontology) -> bool:
    return all(is_normal_ci(ci) for ci in o)


class _Surrogates:
    """Innermost-first, left-to-right surrogate table shared by a run."""

    def __init__(self, supply: NameSupply):
        self.supply = supply
        self.table: dict = {}
        self.order: list = []

    def shape(self, c: Concept) -> Concept:
        if isinstance(c, Name):
            return c
        if isinstance(c, Nom):
            if isinstance(c.term, Ind):
                return c
            return Nom(Iota(self.atom(c.term.body)))
        if isinstance(c, And):
            return And(self.atom(c.left), self.atom(c.right))
        if isinstance(c, Exists):
            return Exists(c.role, self.atom(c.arg))
        if isinstance(c, Dia):
            return Dia(c.index, self.atom(c.arg))
        return type(c)(self.atom(c.arg))

    def atom(self, c: Concept) -> Concept:
        if is_atom(c):
            return c
        return self.name_for(self.shape(c))

    def name_for(self, s: Concept) -> Name:
        if s not in self.table:
            n = self.supply.numbered("A")
            self.table[s] = n
            self.order.append(s)
        return Name(self.table[s])


def normalize_ontology(x) -> ReductionResult:
    """Model-conservative extension in normal form."""
    goal, o, pair = _split(x)
    sur = _Surrogates(_supply(o, goal))
    cis = []
    for ci in o:
        if is_normal_ci(ci):
            cis.append(ci)
            continue
        l = ci.lhs if is_atom(ci.lhs) else sur.shape(ci.lhs)
        r = ci.rhs if is_atom(ci.rhs) else sur.shape(ci.rhs)
        if not is_normal_ci(CI(l, r)) and not is_atom(r):
            r = sur.name_for(r)
        if not is_normal_ci(CI(l, r)):
            l = sur.name_for(l)
        cis.append(CI(l, r))
    if goal is not None and not is_atom(goal):
        goal = sur.atom(goal)
    for s in sur.order:
        a = Name(sur.table[s])
        cis += [CI(a, s), CI(s, a)]
    fresh = {sur.table[s]: s for s in sur.order}
    return ReductionResult(_join(goal, Ontology(cis, o.modality_count), pair), fresh,
                           {"normal_form": True})


def normalize_concept(d: Concept) -> Concept:
    return normalize_concept_result(d).output


def normalize_concept_result(d: Concept) -> ReductionResult:
    """Repeated innermost-first surrogation into ``A and defs``.

    Each definition is ``box^pi forall u.(C <=> A)`` for every path pi
    under which ``C`` occurs in the (partially rewritten) main concept."""
    sur = _Surrogates(_supply(d))
    main = d
    defs = []

    # Walk post-order so that inner subconcepts are surrogated first.
    order: list = []
    seen: set = set()

    def post(c):
        if is_atom(c) or c in seen:
            return
        for k in _kids(c):
            post(k)
        seen.add(c)
        order.append(c)

    post(d)
    current = {}
    for c in order:
        cur = _apply(c, current)
        paths = relevant_paths(main, cur)
        a = Name(sur.supply.numbered("A"))
        main = substitute(main, cur, a)
        current[c] = a
        defs.append((paths, cur, a))
    body = [main]
    for paths, cur, a in reversed(defs):
        for p in sort_paths(paths):
            body.append(box_path(p, forall_u(iff(cur, a))))
    fresh = {a.name: cur for _, cur, a in defs}
    return ReductionResult(conj(body), fresh, {"normal_form": True})


def _kids(c):
    if isinstance(c, Nom):
        return (c.term.body,) if isinstance(c.term, Iota) else ()
    if isinstance(c, Name):
        return ()
    if isinstance(c, And):
        return (c.left, c.right)
    return (c.arg,)


def _apply(c: Concept, current: dict) -> Concept:
    """Rewrite ``c`` with surrogates already introduced for its children."""
    def sub(k):
        return current.get(k, k) if not is_atom(k) else k
    if isinstance(c, Nom):
        return Nom(Iota(sub(c.term.body))) if isinstance(c.term, Iota) else c
    if isinstance(c, And):
        return And(sub(c.left), sub(c.right))
    if isinstance(c, Exists):
        return Exists(c.role, sub(c.arg))
    if isinstance(c, Dia):
        return Dia(c.index, sub(c.arg))
    return type(c)(sub(c.arg))


def _flatten_and(c: Concept) -> list:
    if isinstance(c, And) and not is_bot(c):
        return _flatten_and(c.left) + _flatten_and(c.right)
    return [c]


def parse_normal_concept(c: Concept):
    """Split a normalized concept into its main atom and definitions.

    Returns ``(main, [(path, C, A)])`` or None when ``c`` is not of the
    shape produced by :func:`normalize_concept`."""
    parts = _flatten_and(c)
    if not parts or not is_atom(parts[0]):
        return None
    main, rest = parts[0], parts[1:]
    defs = []
    for part in rest:
        path = []
        x = part
        while (isinstance(x, Not) and isinstance(x.arg, Dia)
               and isinstance(x.arg.arg, Not)):
            path.append(x.arg.index)
            x = x.arg.arg.arg
        if not (isinstance(x, Not) and isinstance(x.arg, ExistsU) and isinstance(x.arg.arg, Not)):
            return None
        body = x.arg.arg.arg
        try:
            lhs = body.left.arg.left
            a = body.left.arg.right.arg
        except AttributeError:
            return None
        if body != iff(lhs, a) or not isinstance(a, Name):
            return None
        defs.append((tuple(path), lhs, a))
    return main, defs


# ---------------------------------------------------- universal role

def eliminate_universal_role(x) -> ReductionResult:
    """Replace ``u`` by fresh roles; negative occurrences use a spy point."""
    goal, o, pair = _split(x)
    if not is_normal_ontology(o):
        raise ReductionError("NOT_NORMAL_FORM", "normalize the ontology first")
    supply = _supply(o, goal)
    cis, fresh = [], {}
    for ci in o:
        l, r = ci.lhs, ci.rhs
        if isinstance(r, ExistsU):
            role = supply("r_u")
            fresh[role] = "u"
            cis.append(CI(l, Exists(role, r.arg)))
        elif isinstance(l, ExistsU):
            role, e, spy = supply("r_u"), supply("e"), supply.numbered("Spy")
            fresh.update({role: "u", e: "spy point", spy: "spy marker"})
            b, b2 = l.arg, r
            cis += [CI(top(), Exists(role, nominal(e))),
                    CI(Name(spy), nominal(e)),
                    CI(Not(b2), Exists(role, Name(spy))),
                    CI(Exists(role, Name(spy)), Not(b))]
        else:
            cis.append(ci)
    return ReductionResult(_join(goal, Ontology(cis, o.modality_count), pair), fresh,
                           {"universal_role": "eliminated"})


# ------------------------------------------------- nominals and iota

def nominals_to_iota(x) -> ReductionResult:
    """Replace ``{a}`` by ``{iota N_a}`` with fresh concept names."""
    if isinstance(x, (tuple, Ontology)):
        goal, o, pair = _split(x)
        supply = _supply(o, goal)
        table = {a: supply("N_" + a) for a in _goal_inds(goal, o)}
        rep = lambda c: _replace_nominals(c, table, lambda n: Nom(Iota(Name(n))))
        out = Ontology([CI(rep(ci.lhs), rep(ci.rhs)) for ci in o], o.modality_count)
        g = rep(goal) if goal is not None else None
        res = _join(g, out, pair)
    else:
        supply = _supply(x)
        table = {a: supply("N_" + a) for a in individuals(x)}
        res = _replace_nominals(x, table, lambda n: Nom(Iota(Name(n))))
    return ReductionResult(res, {n: a for a, n in table.items()},
                           {"nominals": "replaced by descriptions"})


def _iota_schema(a: Concept, b: Concept, ab: Concept):
    """Three CIs (lhs, rhs) expressing ``a == {iota b}`` with witness ``ab``.

    The third CI pins the witness inside ``b`` whenever ``b`` is non-empty;
    without it the pair of inclusions does not force uniqueness."""
    unique = forall_u(implies(b, ab))
    return [(a, conj([b, ab, unique])),
            (And(b, unique), a),
            (b, ExistsU(And(ab, b)))]


def iota_to_nominals_ontology(x) -> ReductionResult:
    goal, o, pair = _split(x)
    if not has_iota(o) and (goal is None or not has_iota(goal)):
        return ReductionResult(x, {}, {})
    if not is_normal_ontology(o) or (goal is not None and has_iota(goal)):
        raise ReductionError("NOT_NORMAL_FORM", "descriptions must sit in normalized CIs")
    supply = _supply(o, goal)
    witness: dict = {}
    cis, done = [], set()

    def wit(b):
        if b not in witness:
            base = b.name if isinstance(b, Name) else "top"
            witness[b] = nominal(supply("a_" + base))
        return witness[b]

    for ci in o:
        side = None
        if isinstance(ci.rhs, Nom) and isinstance(ci.rhs.term, Iota):
            a, b = ci.lhs, ci.rhs.term.body
            side = 0
        elif isinstance(ci.lhs, Nom) and isinstance(ci.lhs.term, Iota):
            a, b = ci.rhs, ci.lhs.term.body
            side = 1
        if side is None:
            cis.append(ci)
            continue
        sch = _iota_schema(a, b, wit(b))
        cis.append(CI(*sch[side]))
        if b not in done:
            done.add(b)
            cis.append(CI(*sch[2]))
    fresh = {w.term.name: b for b, w in witness.items()}
    return ReductionResult(_join(goal, Ontology(cis, o.modality_count), pair), fresh,
                           {"descriptions": "eliminated (total designation)"})


def iota_to_nominals_concept(c: Concept) -> ReductionResult:
    if not has_iota(c):
        return ReductionResult(c, {}, {})
    parsed = parse_normal_concept(c)
    if parsed is None:
        raise ReductionError("NOT_NORMAL_FORM", "expected output of normalize_concept")
    main, defs = parsed
    if has_iota(main):
        raise ReductionError("NOT_NORMAL_FORM", "description in main position")
    supply = _supply(c)
    witness: dict = {}
    body = [main]
    for path, lhs, a in defs:
        if isinstance(lhs, Nom) and isinstance(lhs.term, Iota):
            b = lhs.term.body
            if b not in witness:
                base = b.name if isinstance(b, Name) else "top"
                witness[b] = nominal(supply("a_" + base))
            for l, r in _iota_schema(a, b, witness[b]):
                body.append(box_path(path, forall_u(implies(l, r))))
        else:
            if has_iota(lhs):
                raise ReductionError("NOT_NORMAL_FORM", "nested description")
            body.append(box_path(path, forall_u(iff(lhs, a))))
    fresh = {w.term.name: b for b, w in witness.items()}
    return ReductionResult(conj(_dedup(body)), fresh,
                           {"descriptions": "eliminated (total designation)"})


def iota_pipeline_total(goal: Concept, o: Ontology | None = None) -> ReductionResult:
    """Total designation: normalize then eliminate descriptions."""
    if o is None or len(o) == 0:
        n = normalize_concept_result(goal)
        r = iota_to_nominals_concept(n.output)
        return ReductionResult(r.output, {**n.fresh, **r.fresh},
                               {"pipeline": "normalize,iota_to_nominals"})
    n = normalize_ontology((goal, o))
    r = iota_to_nominals_ontology(n.output)
    return ReductionResult(r.output, {**n.fresh, **r.fresh},
                           {"pipeline": "normalize,iota_to_nominals"})


def iota_pipeline_partial(goal: Concept, o: Ontology | None = None) -> ReductionResult:
    """Partial designation in and out, via a total-mode detour."""
    if o is None or len(o) == 0:
        p = partialize_concept(goal)
        t = iota_pipeline_total(p.output)
        z = totalize_concept(t.output)
        return ReductionResult(z.output, {**p.fresh, **t.fresh},
                               {"pipeline": "partialize,normalize,iota_to_nominals,totalize"})
    p = partialize_ontology((goal, o))
    t = iota_pipeline_total(*p.output)
    z = totalize_ontology(t.output)
    return ReductionResult(z.output, {**p.fresh, **t.fresh},
                           {"pipeline": "partialize,normalize,iota_to_nominals,totalize"})


# ------------------------------------------------- expanding domains

def _relativize(c: Concept, ex: Concept) -> Concept:
    if isinstance(c, Name) or is_bot(c):
        return c
    if isinstance(c, Nom):
        if isinstance(c.term, Ind):
            return And(ex, c)
        return Nom(Iota(And(ex, _relativize(c.term.body, ex))))
    if isinstance(c, Not):
        return Not(_relativize(c.arg, ex))
    if isinstance(c, And):
        return And(_relativize(c.left, ex), _relativize(c.right, ex))
    if isinstance(c, Exists):
        return Exists(c.role, And(ex, _relativize(c.arg, ex)))
    if isinstance(c, Dia):
        return Dia(c.index, _relativize(c.arg, ex))
    return type(c)(And(ex, _relativize(c.arg, ex)))


def relativize_to_constant(x) -> ReductionResult:
    """Expanding domains to constant domains through an existence marker.

    Input is a ``(goal, ontology)`` pair (the ontology may be None or empty).
    Sound and complete for partial designation in and out; see the notes."""
    goal, o = x
    o = o if o is not None else Ontology((), 1)
    supply = _supply(goal, o)
    ex = Name(supply("Ex"))
    g = And(ex, _relativize(goal, ex))
    if len(o):
        cis = [CI(And(ex, _relativize(ci.lhs, ex)), _relativize(ci.rhs, ex)) for ci in o]
        cis += [CI(ex, box(i, ex)) for i in range(1, o.modality_count + 1)]
        cis.append(CI(top(), ExistsU(ex)))
        out_o = Ontology(cis, o.modality_count)
    else:
        extra = []
        for p in sort_paths(all_paths(goal)):
            if p:
                extra.append(box_path(p[:-1], forall_u(implies(ex, box(p[-1], ex)))))
        if not extra:
            # modality-free goal: the root conjunct is emitted anyway, it is harmless
            extra.append(forall_u(implies(ex, box(1, ex))))
        g = conj([g] + _dedup(extra))
        out_o = o
    return ReductionResult((g, out_o), {ex.name: "existence"},
                           {"domains": "expanding -> constant", "designation": "partial"})


# ------------------------------------------------------ ELO rewrites

def _negation_free(c: Concept) -> bool:
    if is_top(c) or is_bot(c) or isinstance(c, Name):
        return True
    if isinstance(c, Not):
        return False
    if isinstance(c, Nom):
        return isinstance(c.term, Ind) or _negation_free(c.term.body)
    if isinstance(c, And):
        return _negation_free(c.left) and _negation_free(c.right)
    return _negation_free(c.arg)


def _as_disjunction(c: Concept):
    if (isinstance(c, Not) and isinstance(c.arg, And) and isinstance(c.arg.left, Not)
            and isinstance(c.arg.right, Not) and not is_top(c)):
        return c.arg.left.arg, c.arg.right.arg
    return None


def eliminate_disjunction_elo(o: Ontology, finite: bool = False, future: int = 2) -> ReductionResult:
    """Remove negation and disjunction from a normal-form temporal ontology.

    ``future`` is the index of the strict-future diamond.  With ``finite``
    every CI is guarded by two further instants first."""
    supply = _supply(o)
    guard = Dia(future, Dia(future, top())) if finite else None
    cis, fresh = [], {}

    def add(l, r):
        cis.append(CI(And(guard, l) if guard is not None else l, r))

    for ci in o:
        l, r = ci.lhs, ci.rhs
        d = _as_disjunction(r) if is_top(l) else None
        if d is None and isinstance(l, Not) and not is_top(l) and _negation_free(l.arg) and _negation_free(r):
            d = (l.arg, r)
        if d is not None:
            b1, b2 = d
            q, x1, x2 = supply("q"), Name(supply.numbered("X")), Name(supply.numbered("X"))
            fresh.update({q: "order witness", x1.name: b1, x2.name: b2})
            f = lambda c: Dia(future, c)
            add(top(), Exists(q, And(f(x1), f(x2))))
            add(Exists(q, f(And(x1, f(x2)))), b1)
            add(Exists(q, f(And(x1, x2))), b1)
            add(Exists(q, f(And(x2, f(x1)))), b2)
            continue
        if isinstance(r, Not) and not is_top(r) and _negation_free(r.arg) and _negation_free(l):
            add(And(l, r.arg), bot())
            continue
        if not (_negation_free(l) and _negation_free(r)):
            raise ReductionError("SHAPE", f"unsupported CI shape for negation removal: {ci}")
        add(l, r)
    return ReductionResult(Ontology(cis, max(o.modality_count, future)), fresh,
                           {"flow": "finite" if finite else "infinite"})


def eliminate_bot_elo(o: Ontology, future: int = 2) -> ReductionResult:
    """Replace bottom by a fresh name L that propagates backwards.

    The goal ``A`` is satisfiable under the input iff ``A [= L`` is not
    entailed by the output."""
    supply = _supply(o)
    low = Name(supply("L"))

    def fn(c):
        if is_top(c):
            return c
        if is_bot(c):
            return low
        return None

    cis = []
    for ci in o:
        l, r = map_concept(ci.lhs, fn), map_concept(ci.rhs, fn)
        if not (_negation_free(l) and _negation_free(r)):
            raise ReductionError("SHAPE", f"negation left in CI: {ci}")
        cis.append(CI(l, r))
    roles = sorted(signature(o).role_names)
    cis += [CI(Exists(s, low), low) for s in roles]
    cis.append(CI(Dia(future, low), low))
    return ReductionResult(Ontology(cis, max(o.modality_count, future)), {low.name: "bottom"},
                           {"bottom": "replaced"})


__all__ = [
    "ReductionError", "ReductionResult", "enforce_rda_ontology", "enforce_rda_concept_total",
    "totalize_ontology", "totalize_concept", "partialize_ontology", "partialize_concept",
    "is_atom", "is_shape", "is_normal_ci", "is_normal_ontology", "normalize_ontology",
    "normalize_concept", "normalize_concept_result", "parse_normal_concept",
    "eliminate_universal_role", "nominals_to_iota", "iota_to_nominals_ontology",
    "iota_to_nominals_concept", "iota_pipeline_total", "iota_pipeline_partial",
    "relativize_to_constant", "eliminate_disjunction_elo", "eliminate_bot_elo",
]
