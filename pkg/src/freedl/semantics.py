"""Interpretations, evaluation and the bounded finite-model oracle.

The oracle has two engines behind one contract.  ``sat`` grounds the
bounded problem into propositional clauses and hands them to a SAT solver;
``enumerate`` walks every interpretation up to the bounds.  Both return
witnesses that are re-checked by the direct evaluator in this module, so a
grounding bug cannot silently produce a false SAT verdict.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterator

from .syntax import (
    CI, FALSUM, And, Concept, Dia, Exists, ExistsDiff, ExistsOne, ExistsU, Ind,
    Name, Nom, Not, Ontology, Signature, modal_depth, modal_indices,
    signature, subconcepts_of,
)

UNDEFINED = None
DEFAULT_WORK_CAP = 3_000_000


class ResourceError(RuntimeError):
    """Raised when a bounded search would exceed the configured work cap."""


def work_cap() -> int:
    v = os.environ.get("FREEDL_WORK_CAP")
    return int(v) if v else DEFAULT_WORK_CAP


# ------------------------------------------------------------- frames

@dataclass(frozen=True)
class FrameClass:
    kind: str            # Kn | S5n | KStarN | KfStarN | LTLFinite | LTLInfinitePrefix
    n: int = 1           # base modalities (LTL: ignored)
    length: int = 0      # LTL only

    @property
    def modality_count(self) -> int:
        if self.kind in ("KStarN", "KfStarN"):
            return self.n + 1
        if self.kind.startswith("LTL"):
            return 2
        return self.n

    @property
    def is_temporal(self) -> bool:
        return self.kind.startswith("LTL")

    def __str__(self) -> str:
        if self.is_temporal:
            return f"{self.kind}({self.length})"
        return f"{self.kind}({self.n})"


def Kn(n: int = 1) -> FrameClass:
    return FrameClass("Kn", n)


def S5n(n: int = 1) -> FrameClass:
    return FrameClass("S5n", n)


def KStarN(n: int = 1) -> FrameClass:
    return FrameClass("KStarN", n)


def KfStarN(n: int = 1) -> FrameClass:
    return FrameClass("KfStarN", n)


def LTLFinite(length: int) -> FrameClass:
    return FrameClass("LTLFinite", 1, length)


def LTLInfinitePrefix(length: int) -> FrameClass:
    return FrameClass("LTLInfinitePrefix", 1, length)


@dataclass(frozen=True)
class Frame:
    worlds: int
    relations: dict   # modality -> frozenset of (w, v)

    def successors(self, i: int, w: int) -> list[int]:
        return sorted(v for (x, v) in self.relations.get(i, ()) if x == w)

    def edges(self):
        for i in sorted(self.relations):
            for (w, v) in sorted(self.relations[i]):
                yield i, w, v


def chain_frame(length: int) -> Frame:
    """Instants 0..length-1; modality 1 is successor, 2 is strict order."""
    succ = frozenset((t, t + 1) for t in range(length - 1))
    less = frozenset((t, s) for t in range(length) for s in range(t + 1, length))
    return Frame(length, {1: succ, 2: less})


def transitive_closure(pairs, worlds: int) -> frozenset:
    reach = set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(reach):
            for (c, d) in list(reach):
                if b == c and (a, d) not in reach:
                    reach.add((a, d))
                    changed = True
    return frozenset(reach)


def frame_in_class(f: Frame, fc: FrameClass) -> bool:
    W = range(f.worlds)
    if fc.kind == "S5n":
        for i in range(1, fc.n + 1):
            r = f.relations.get(i, frozenset())
            if any((w, w) not in r for w in W):
                return False
            if any((v, w) not in r for (w, v) in r):
                return False
            if transitive_closure(r, f.worlds) != r:
                return False
        return True
    if fc.kind in ("KStarN", "KfStarN"):
        union = frozenset().union(*(f.relations.get(i, frozenset()) for i in range(1, fc.n + 1)))
        tc = transitive_closure(union, f.worlds)
        if f.relations.get(fc.n + 1, frozenset()) != tc:
            return False
        return fc.kind == "KStarN" or all((w, w) not in tc for w in W)
    if fc.is_temporal:
        want = chain_frame(f.worlds)
        ok_len = f.worlds <= fc.length if fc.kind == "LTLFinite" else f.worlds == fc.length + 1
        return ok_len and all(f.relations.get(i, frozenset()) == want.relations[i] for i in (1, 2))
    return all(i <= fc.n for i in f.relations)


# ------------------------------------------------------ interpretations

@dataclass(frozen=True)
class Interpretation:
    frame: Frame
    domains: tuple            # per world: frozenset of elements
    concepts: tuple           # per world: dict name -> frozenset
    roles: tuple              # per world: dict role -> frozenset of pairs
    individuals: tuple        # per world: dict name -> element (absent = undefined)

    @property
    def worlds(self) -> range:
        return range(self.frame.worlds)

    def elements(self) -> frozenset:
        return frozenset().union(*self.domains)


class Evaluator:
    """Memoising evaluator for one interpretation."""

    def __init__(self, m: Interpretation):
        self.m = m
        self.memo: dict = {}

    def term(self, w: int, t):
        if isinstance(t, Ind):
            return self.m.individuals[w].get(t.name, UNDEFINED)
        ext = self.ext(w, t.body)
        return next(iter(ext)) if len(ext) == 1 else UNDEFINED

    def ext(self, w: int, c: Concept) -> frozenset:
        key = (w, c)
        r = self.memo.get(key)
        if r is None:
            r = self._ext(w, c)
            self.memo[key] = r
        return r

    def _ext(self, w: int, c: Concept) -> frozenset:
        m = self.m
        dom = m.domains[w]
        if isinstance(c, Name):
            return m.concepts[w].get(c.name, frozenset()) & dom
        if isinstance(c, Nom):
            d = self.term(w, c.term)
            return frozenset() if d is UNDEFINED else frozenset({d})
        if isinstance(c, Not):
            return dom - self.ext(w, c.arg)
        if isinstance(c, And):
            return self.ext(w, c.left) & self.ext(w, c.right)
        if isinstance(c, Exists):
            inner = self.ext(w, c.arg)
            rel = m.roles[w].get(c.role, frozenset())
            return frozenset(d for (d, e) in rel if e in inner and d in dom)
        if isinstance(c, ExistsU):
            return dom if self.ext(w, c.arg) else frozenset()
        if isinstance(c, ExistsDiff):
            inner = self.ext(w, c.arg)
            return frozenset(d for d in dom if inner - {d})
        if isinstance(c, ExistsOne):
            return dom if len(self.ext(w, c.arg)) == 1 else frozenset()
        if isinstance(c, Dia):
            out = set()
            for v in m.frame.successors(c.index, w):
                out |= self.ext(v, c.arg)
            return frozenset(out) & dom
        raise TypeError(f"not a concept: {c!r}")


def term_value(m: Interpretation, w: int, t):
    return Evaluator(m).term(w, t)


def extension(m: Interpretation, w: int, c: Concept) -> frozenset:
    return Evaluator(m).ext(w, c)


def satisfied_at(m: Interpretation, w: int, c: Concept) -> bool:
    return bool(extension(m, w, c))


def satisfies_ci(m: Interpretation, ci: CI, worlds=None, ev: Evaluator | None = None) -> bool:
    ev = ev or Evaluator(m)
    ws = m.worlds if worlds is None else worlds
    return all(ev.ext(w, ci.lhs) <= ev.ext(w, ci.rhs) for w in ws)


def satisfies_ontology(m: Interpretation, o: Ontology, worlds=None, ev: Evaluator | None = None) -> bool:
    ev = ev or Evaluator(m)
    return all(satisfies_ci(m, ci, worlds, ev) for ci in o.cis)


@dataclass(frozen=True)
class ModelProperties:
    is_total: bool
    is_rda: bool
    is_constant_domain: bool
    is_expanding: bool
    frame_class_memberships: tuple


def is_rda(m: Interpretation) -> bool:
    for (i, w, v) in m.frame.edges():
        for a, d in m.individuals[w].items():
            if m.individuals[v].get(a, UNDEFINED) != d:
                return False
    return True


def model_properties(m: Interpretation, names=None, classes=()) -> ModelProperties:
    names = set(names) if names is not None else set().union(*(set(x) for x in m.individuals))
    total = all(a in m.individuals[w] for w in m.worlds for a in names)
    const = len(set(m.domains)) <= 1
    expanding = all(m.domains[w] <= m.domains[v] for (_, w, v) in m.frame.edges())
    mem = tuple(str(fc) for fc in classes if frame_in_class(m.frame, fc))
    return ModelProperties(total, is_rda(m), const, expanding, mem)


# ------------------------------------------------------------- bounds

@dataclass(frozen=True)
class ModelBounds:
    max_worlds: int = 2
    max_domain: int = 2
    frame_class: FrameClass = field(default_factory=Kn)
    domain_mode: str = "constant"       # constant | expanding
    designation_mode: str = "partial"   # partial | total
    rda: bool = False

    def __post_init__(self):
        if self.max_worlds < 1 or self.max_domain < 1:
            raise ValueError("bounds must be at least 1")
        if self.domain_mode not in ("constant", "expanding"):
            raise ValueError(f"bad domain mode {self.domain_mode!r}")
        if self.designation_mode not in ("partial", "total"):
            raise ValueError(f"bad designation mode {self.designation_mode!r}")

    def world_counts(self) -> list[int]:
        fc = self.frame_class
        if fc.kind == "LTLFinite":
            return list(range(1, fc.length + 1))
        if fc.kind == "LTLInfinitePrefix":
            return [fc.length + 1]
        return list(range(1, self.max_worlds + 1))

    def describe(self) -> str:
        return (f"worlds<={self.max_worlds}, domain<={self.max_domain}, {self.frame_class}, "
                f"{self.domain_mode}, {self.designation_mode}{', rda' if self.rda else ''}")


@dataclass
class OracleResult:
    sat: bool
    bounds: ModelBounds
    witness: Interpretation | None = None
    world: int | None = None

    @property
    def verdict(self) -> str:
        return "sat" if self.sat else "unsat-up-to-bounds"

    def __bool__(self) -> bool:
        return self.sat


def _checked_worlds(m: Interpretation, o: Ontology, fc: FrameClass):
    if fc.kind == "LTLInfinitePrefix":
        return range(0, max(0, fc.length - modal_depth(o)) + 1)
    return m.worlds


def check_witness(m: Interpretation, goal: Concept | None, o: Ontology, bounds: ModelBounds):
    """Return a world satisfying the goal if ``m`` is a genuine witness."""
    ev = Evaluator(m)
    fc = bounds.frame_class
    if not frame_in_class(m.frame, fc):
        return None
    if bounds.domain_mode == "constant" and len(set(m.domains)) > 1:
        return None
    if any(not d for d in m.domains):
        return None
    if any(not (m.domains[w] <= m.domains[v]) for (_, w, v) in m.frame.edges()):
        return None
    if bounds.rda and not is_rda(m):
        return None
    names = signature([goal, o] if goal is not None else o).individual_names
    if bounds.designation_mode == "total" and any(a not in m.individuals[w] for w in m.worlds for a in names):
        return None
    if not satisfies_ontology(m, o, _checked_worlds(m, o, fc), ev):
        return None
    if goal is None:
        return 0
    ws = [0] if fc.kind == "LTLInfinitePrefix" else list(m.worlds)
    for w in ws:
        if ev.ext(w, goal):
            return w
    return None


# ---------------------------------------------------- SAT grounding

class _Grounding:
    """Propositional encoding of 'goal satisfiable under o' for k worlds."""

    def __init__(self, goal, onto: Ontology, bounds: ModelBounds, k: int):
        from pysat.formula import IDPool

        self.goal, self.onto, self.bounds, self.k = goal, onto, bounds, k
        self.fc = bounds.frame_class
        self.D = bounds.max_domain
        self.pool = IDPool()
        self.cls: list[list[int]] = []
        self.TRUE = self.v("true")
        self.cls.append([self.TRUE])
        things = [onto] + ([goal] if goal is not None else [])
        self.sig = signature(things)
        self.subs = subconcepts_of(things)
        mods = modal_indices(things)
        if mods and max(mods) > self.fc.modality_count:
            raise ValueError(f"modality {max(mods)} not available in frame class {self.fc}")
        self.mods = list(range(1, self.fc.modality_count + 1))
        self.xcache: dict = {}
        self.cap = work_cap()

    def v(self, *key) -> int:
        return self.pool.id(key)

    def add(self, c):
        self.cls.append(c)
        if len(self.cls) > self.cap:
            raise ResourceError(f"grounding exceeds the work cap of {self.cap} clauses "
                                f"({self.bounds.describe()})")

    # gates ------------------------------------------------------
    def AND(self, key, lits):
        lits = [l for l in lits if l != self.TRUE]
        if any(l == -self.TRUE for l in lits):
            return -self.TRUE
        if not lits:
            return self.TRUE
        if len(lits) == 1:
            return lits[0]
        out = self.v(*key)
        for l in lits:
            self.add([-out, l])
        self.add([out] + [-l for l in lits])
        return out

    def OR(self, key, lits):
        lits = [l for l in lits if l != -self.TRUE]
        if any(l == self.TRUE for l in lits):
            return self.TRUE
        if not lits:
            return -self.TRUE
        if len(lits) == 1:
            return lits[0]
        out = self.v(*key)
        self.add([-out] + lits)
        for l in lits:
            self.add([out, -l])
        return out

    # structure ------------------------------------------------------
    def rel(self, i, w, v):
        return self.R[(i, w, v)]

    def ex(self, w, d):
        return self.EX[(w, d)]

    def build(self):
        k, D, fc = self.k, self.D, self.fc
        W = range(k)
        self.R = {}
        if fc.is_temporal:
            f = chain_frame(k)
            for i in (1, 2):
                for w in W:
                    for u in W:
                        self.R[(i, w, u)] = self.TRUE if (w, u) in f.relations[i] else -self.TRUE
        else:
            base = fc.n
            for i in range(1, base + 1):
                for w in W:
                    for u in W:
                        if fc.kind == "S5n":
                            self.R[(i, w, u)] = self.TRUE if w == u else self.v("R", i, min(w, u), max(w, u))
                        else:
                            self.R[(i, w, u)] = self.v("R", i, w, u)
            if fc.kind == "S5n":
                for i in range(1, base + 1):
                    for a, b, c in itertools.permutations(W, 3):
                        self.add([-self.R[(i, a, b)], -self.R[(i, b, c)], self.R[(i, a, c)]])
            if fc.kind in ("KStarN", "KfStarN"):
                union = {(w, u): self.OR(("U", w, u), [self.R[(i, w, u)] for i in range(1, base + 1)])
                         for w in W for u in W}
                reach = dict(union)
                for step in range(1, k):
                    nxt = {}
                    for w in W:
                        for u in W:
                            terms = [reach[(w, u)]] + [self.AND(("P", step, w, m, u), [reach[(w, m)], union[(m, u)]])
                                                       for m in W]
                            nxt[(w, u)] = self.OR(("Q", step, w, u), terms)
                    reach = nxt
                for w in W:
                    for u in W:
                        self.R[(base + 1, w, u)] = reach[(w, u)]
                if fc.kind == "KfStarN":
                    for w in W:
                        self.add([-reach[(w, w)]])
        # domains
        self.EX = {}
        for w in W:
            for d in range(D):
                self.EX[(w, d)] = self.v("ex", d) if self.bounds.domain_mode == "constant" else self.v("ex", w, d)
        for w in W:
            self.add([self.ex(w, d) for d in range(D)])
        used = [self.OR(("used", d), [self.ex(w, d) for w in W]) for d in range(D)]
        for d in range(D - 1):
            self.add([-used[d + 1], used[d]])
        if self.bounds.domain_mode == "expanding":
            for i in self.mods:
                for w in W:
                    for u in W:
                        r = self.rel(i, w, u)
                        if r == -self.TRUE or w == u:
                            continue
                        for d in range(D):
                            self.add([-r, -self.ex(w, d), self.ex(u, d)])
        # symbols
        for a in sorted(self.sig.concept_names | {FALSUM}):
            for w in W:
                for d in range(D):
                    self.add([-self.v("A", a, w, d), self.ex(w, d)])
        for r in sorted(self.sig.role_names):
            for w in W:
                for d in range(D):
                    for e in range(D):
                        x = self.v("r", r, w, d, e)
                        self.add([-x, self.ex(w, d)])
                        self.add([-x, self.ex(w, e)])
        for a in sorted(self.sig.individual_names):
            for w in W:
                lits = [self.v("i", a, w, d) for d in range(D)]
                for d in range(D):
                    self.add([-lits[d], self.ex(w, d)])
                for d, e in itertools.combinations(range(D), 2):
                    self.add([-lits[d], -lits[e]])
                if self.bounds.designation_mode == "total":
                    self.add(lits)
            if self.bounds.rda:
                for i in self.mods:
                    for w in W:
                        for u in W:
                            r = self.rel(i, w, u)
                            if r == -self.TRUE:
                                continue
                            for d in range(D):
                                self.add([-r, -self.v("i", a, w, d), self.v("i", a, u, d)])
        # ontology
        checked = range(k)
        if fc.kind == "LTLInfinitePrefix":
            checked = range(0, max(0, fc.length - modal_depth(self.onto)) + 1)
        for ci in self.onto.cis:
            for w in checked:
                for d in range(D):
                    self.add([-self.x(ci.lhs, w, d), self.x(ci.rhs, w, d)])
        if self.goal is not None:
            ws = [0] if fc.kind == "LTLInfinitePrefix" else list(W)
            self.add([self.x(self.goal, w, d) for w in ws for d in range(D)])

    def x(self, c: Concept, w: int, d: int) -> int:
        key = (c, w, d)
        r = self.xcache.get(key)
        if r is None:
            r = self._x(c, w, d)
            self.xcache[key] = r
        return r

    def _x(self, c, w, d):
        D = range(self.D)
        ex = self.ex(w, d)
        tag = ("x", c, w, d)
        if isinstance(c, Name):
            return self.v("A", c.name, w, d)
        if isinstance(c, Nom):
            if isinstance(c.term, Ind):
                return self.v("i", c.term.name, w, d)
            b = c.term.body
            return self.AND(tag, [self.x(b, w, d)] + [-self.x(b, w, e) for e in D if e != d])
        if isinstance(c, Not):
            return self.AND(tag, [ex, -self.x(c.arg, w, d)])
        if isinstance(c, And):
            return self.AND(tag, [self.x(c.left, w, d), self.x(c.right, w, d)])
        if isinstance(c, Exists):
            terms = [self.AND(("xe", c, w, d, e), [self.v("r", c.role, w, d, e), self.x(c.arg, w, e)]) for e in D]
            return self.OR(tag, terms)
        if isinstance(c, ExistsU):
            ne = self.OR(("ne", c.arg, w), [self.x(c.arg, w, e) for e in D])
            return self.AND(tag, [ex, ne])
        if isinstance(c, ExistsDiff):
            other = self.OR(("nd", c.arg, w, d), [self.x(c.arg, w, e) for e in D if e != d])
            return self.AND(tag, [ex, other])
        if isinstance(c, ExistsOne):
            singles = [self.AND(("sg", c.arg, w, e), [self.x(c.arg, w, e)] + [-self.x(c.arg, w, f) for f in D if f != e])
                       for e in D]
            one = self.OR(("one", c.arg, w), singles)
            return self.AND(tag, [ex, one])
        if isinstance(c, Dia):
            terms = []
            for u in range(self.k):
                r = self.rel(c.index, w, u)
                if r == -self.TRUE:
                    continue
                terms.append(self.AND(("xd", c, w, u, d), [r, self.x(c.arg, u, d)]))
            return self.AND(tag, [ex, self.OR(("xdo", c, w, d), terms)])
        raise TypeError(f"not a concept: {c!r}")

    def decode(self, model) -> Interpretation:
        val = set(l for l in model if l > 0)

        def t(lit):
            return lit == self.TRUE or (lit > 0 and lit in val) or (lit < 0 and lit != -self.TRUE and -lit not in val)

        k, D = self.k, self.D
        W = range(k)
        rels = {}
        for i in self.mods:
            rels[i] = frozenset((w, u) for w in W for u in W if t(self.rel(i, w, u)))
        frame = Frame(k, rels)
        doms = tuple(frozenset(d for d in range(D) if t(self.ex(w, d))) for w in W)
        concepts = tuple({a: frozenset(d for d in doms[w] if t(self.v("A", a, w, d)))
                          for a in sorted(self.sig.concept_names)} for w in W)
        roles = tuple({r: frozenset((d, e) for d in doms[w] for e in doms[w] if t(self.v("r", r, w, d, e)))
                       for r in sorted(self.sig.role_names)} for w in W)
        inds = tuple({a: d for a in sorted(self.sig.individual_names) for d in range(D)
                      if t(self.v("i", a, w, d))} for w in W)
        return Interpretation(frame, doms, concepts, roles, inds)


def _oracle_sat_solver(goal, onto, bounds) -> OracleResult:
    from pysat.solvers import Solver

    for k in bounds.world_counts():
        g = _Grounding(goal, onto, bounds, k)
        g.build()
        with Solver(name="glucose4", bootstrap_with=g.cls) as s:
            if not s.solve():
                continue
            m = g.decode(s.get_model())
        w = check_witness(m, goal, onto, bounds)
        if w is None:
            raise AssertionError("SAT grounding produced a model the evaluator rejects")
        return OracleResult(True, bounds, m, w)
    return OracleResult(False, bounds)


# ------------------------------------------------------- enumeration

def _perm_frame(rels, perm):
    return tuple(sorted((i, perm[w], perm[v]) for (i, w, v) in rels))


def enumerate_frames(fc: FrameClass, k: int) -> Iterator[Frame]:
    """Frames of ``k`` worlds in the class, one per isomorphism class."""
    if fc.is_temporal:
        yield chain_frame(k)
        return
    pairs = [(w, v) for w in range(k) for v in range(k)]
    if fc.kind == "S5n":
        per_mod = [frozenset((w, v) for w in range(k) for v in range(k) if blk[w] == blk[v])
                   for blk in _partitions(k)]
        per_mod = sorted(set(per_mod), key=sorted)
    else:
        per_mod = [frozenset(p for p, bit in zip(pairs, bits) if bit)
                   for bits in itertools.product((0, 1), repeat=len(pairs))]
    perms = list(itertools.permutations(range(k)))
    seen = set()
    for combo in itertools.product(per_mod, repeat=fc.n):
        rels = {i + 1: combo[i] for i in range(fc.n)}
        if fc.kind in ("KStarN", "KfStarN"):
            union = frozenset().union(*combo) if combo else frozenset()
            tc = transitive_closure(union, k)
            if fc.kind == "KfStarN" and any((w, w) in tc for w in range(k)):
                continue
            rels[fc.n + 1] = tc
        flat = [(i, w, v) for i in rels for (w, v) in rels[i]]
        canon = min(_perm_frame(flat, p) for p in perms)
        if canon in seen:
            continue
        seen.add(canon)
        yield Frame(k, rels)


def _partitions(k: int):
    def rec(i, blocks):
        if i == k:
            yield tuple(blocks)
            return
        top_ = max(blocks, default=-1)
        for b in range(top_ + 2):
            yield from rec(i + 1, blocks + [b])
    yield from rec(0, [])


def _subsets(xs):
    xs = list(xs)
    for r in range(len(xs) + 1):
        for c in itertools.combinations(xs, r):
            yield frozenset(c)


def _domain_assignments(frame: Frame, D: int, mode: str):
    k = frame.worlds
    if mode == "constant":
        for m in range(1, D + 1):
            yield tuple(frozenset(range(m)) for _ in range(k))
        return
    nonempty = [s for s in _subsets(range(D)) if s]
    for doms in itertools.product(nonempty, repeat=k):
        union = frozenset().union(*doms)
        if union != frozenset(range(len(union))):
            continue
        if all(doms[w] <= doms[v] for (_, w, v) in frame.edges()):
            yield doms


def enumerate_models(sig: Signature, bounds: ModelBounds) -> Iterator[Interpretation]:
    """Every interpretation up to the bounds, frames and elements up to symmetry."""
    cap = work_cap()
    fc = bounds.frame_class
    cnames = sorted(sig.concept_names - {FALSUM})
    rnames = sorted(sig.role_names)
    inames = sorted(sig.individual_names)
    for k in bounds.world_counts():
        for frame in enumerate_frames(fc, k):
            for doms in _domain_assignments(frame, bounds.max_domain, bounds.domain_mode):
                per_world = []
                estimate = 1
                for w in range(k):
                    dom = sorted(doms[w])
                    ext_choices = list(_subsets(dom))
                    rel_choices = list(_subsets([(d, e) for d in dom for e in dom]))
                    ind_choices = dom + ([None] if bounds.designation_mode == "partial" else [])
                    opts = ([ext_choices] * len(cnames) + [rel_choices] * len(rnames)
                            + [ind_choices] * len(inames))
                    for o in opts:
                        estimate *= len(o)
                    per_world.append(opts)
                if estimate > cap:
                    raise ResourceError(f"enumeration of {estimate} interpretations exceeds the work cap {cap}")
                elems = sorted(frozenset().union(*doms))
                perms = [p for p in itertools.permutations(elems)
                         if all(frozenset(p[d] for d in doms[w]) == doms[w] for w in range(k))]
                for choice in itertools.product(*[itertools.product(*opts) for opts in per_world]):
                    m = _assemble(frame, doms, choice, cnames, rnames, inames)
                    if bounds.rda and not is_rda(m):
                        continue
                    if len(perms) > 1 and not _is_canonical(m, perms, cnames, rnames, inames):
                        continue
                    yield m


def _assemble(frame, doms, choice, cnames, rnames, inames) -> Interpretation:
    concepts, roles, inds = [], [], []
    for w, vals in enumerate(choice):
        nc, nr = len(cnames), len(rnames)
        concepts.append(dict(zip(cnames, vals[:nc])))
        roles.append(dict(zip(rnames, vals[nc:nc + nr])))
        inds.append({a: d for a, d in zip(inames, vals[nc + nr:]) if d is not None})
    return Interpretation(frame, doms, tuple(concepts), tuple(roles), tuple(inds))


def _model_key(m, p, cnames, rnames, inames):
    key = []
    for w in m.worlds:
        for a in cnames:
            key.append(tuple(sorted(p[d] for d in m.concepts[w][a])))
        for r in rnames:
            key.append(tuple(sorted((p[d], p[e]) for (d, e) in m.roles[w][r])))
        for a in inames:
            d = m.individuals[w].get(a)
            key.append(-1 if d is None else p[d])
    return tuple(key)


def _is_canonical(m, perms, cnames, rnames, inames) -> bool:
    ident = {d: d for d in perms[0]}
    mine = _model_key(m, ident, cnames, rnames, inames)
    for p in perms[1:]:
        pm = dict(zip(perms[0], p))
        if _model_key(m, pm, cnames, rnames, inames) < mine:
            return False
    return True


def _oracle_enumerate(goal, onto, bounds) -> OracleResult:
    sig = signature([onto] + ([goal] if goal is not None else []))
    for m in enumerate_models(sig, bounds):
        w = check_witness(m, goal, onto, bounds)
        if w is not None:
            return OracleResult(True, bounds, m, w)
    return OracleResult(False, bounds)


def oracle_sat(c: Concept | None, o: Ontology | None = None, bounds: ModelBounds | None = None,
               engine: str = "sat") -> OracleResult:
    """Bounded satisfiability of ``c`` under ``o``.

    An UNSAT answer only means no witness exists within ``bounds``.
    """
    o = o if o is not None else Ontology((), 1)
    bounds = bounds or ModelBounds()
    if engine == "sat":
        return _oracle_sat_solver(c, o, bounds)
    if engine == "enumerate":
        return _oracle_enumerate(c, o, bounds)
    raise ValueError(f"unknown engine {engine!r}")


# ---------------------------------------------------------- reports

def model_to_dict(m: Interpretation) -> dict:
    return {
        "worlds": list(m.worlds),
        "edges": {str(i): sorted([list(p) for p in m.frame.relations[i]]) for i in sorted(m.frame.relations)},
        "domains": [sorted(d) for d in m.domains],
        "concepts": [{a: sorted(s) for a, s in sorted(cw.items())} for cw in m.concepts],
        "roles": [{r: sorted([list(p) for p in s]) for r, s in sorted(rw.items())} for rw in m.roles],
        "individuals": [{a: iw.get(a, "undef") for a in sorted(set().union(*(set(x) for x in m.individuals)))}
                        for iw in m.individuals],
    }


def format_model(m: Interpretation) -> str:
    d = model_to_dict(m)
    lines = [f"worlds: {' '.join(map(str, d['worlds']))}"]
    for i, es in d["edges"].items():
        lines.append(f"R{i}: " + (" ".join(f"{a}->{b}" for a, b in es) or "-"))
    for w in m.worlds:
        lines.append(f"world {w}: domain {{{', '.join(map(str, d['domains'][w]))}}}")
        for a, s in d["concepts"][w].items():
            lines.append(f"  {a} = {{{', '.join(map(str, s))}}}")
        for r, s in d["roles"][w].items():
            lines.append(f"  {r} = {{{', '.join(f'({x},{y})' for x, y in s)}}}")
        for a, v in d["individuals"][w].items():
            lines.append(f"  {a} -> {v}")
    return "\n".join(lines)
