"""Decision procedures built on types, quasistates and runs.

All procedures here work with *total* designation.  Partial inputs are
handled upstream by the reductions (see ``cli``).  Every SAT answer comes
with a finite model that :func:`verify_labels` re-evaluates with the plain
semantics, independently of the search that produced it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .semantics import (
    Frame, Interpretation, KfStarN, Kn, S5n, chain_frame, frame_in_class,
    satisfied_at, Evaluator, ResourceError, work_cap,
)
from .syntax import (
    And, CI, Concept, Dia, Exists, ExistsDiff, ExistsOne, ExistsU, Ind, Iota,
    Name, Nom, Not, Ontology, closure, modal_depth, subconcepts_of,
)

DEFAULT_CLOSURE_CAP = 24


class FragmentError(ValueError):
    code = "FRAGMENT_ERROR"


class CapError(ValueError):
    code = "CAP_EXCEEDED"


# ------------------------------------------------------------------ types

def _order_key(c: Concept):
    # deterministic closure order: by size, then by printed form
    from .parser import print_concept
    return (len(subconcepts_of(c)), print_concept(c))


class TypeSpace:
    """Types over the closure of a concept (and optional ontology).

    A type is stored as a frozenset of the *positive* (non-negation)
    closure members it contains; ``holds`` decides any closure member."""

    def __init__(self, c0: Concept, o: Ontology | None = None, cap: int = DEFAULT_CLOSURE_CAP):
        items = [c0] + ([o] if o is not None else [])
        cl = closure(items)
        if len(cl) > cap:
            raise CapError(f"closure has {len(cl)} members, cap is {cap}")
        self.c0 = c0
        self.ontology = o
        self.closure = sorted(cl, key=_order_key)
        self.pos = [c for c in self.closure if not isinstance(c, Not)]
        free = [c for c in self.pos if not isinstance(c, And)]
        ands = [c for c in self.pos if isinstance(c, And)]
        types = []
        for bits in range(1 << len(free)):
            t = {c for k, c in enumerate(free) if bits >> k & 1}
            for c in ands:          # ands are sorted by size: parts come first
                if self._holds(t, c.left) and self._holds(t, c.right):
                    t.add(c)
            types.append(frozenset(t))
        self.all_types = types
        self.exists_u = [c for c in self.pos if isinstance(c, ExistsU)]
        self.exists_r = [c for c in self.pos if isinstance(c, Exists)]
        self.dias = [c for c in self.pos if isinstance(c, Dia)]
        self.nominals = sorted({c.term.name for c in self.pos
                                if isinstance(c, Nom) and isinstance(c.term, Ind)})
        self.roles = sorted({c.role for c in self.exists_r})
        self.modalities = sorted({c.index for c in self.dias})

    @staticmethod
    def _holds(t, c) -> bool:
        if isinstance(c, Not):
            return not TypeSpace._holds(t, c.arg)
        return c in t

    def holds(self, t, c) -> bool:
        return self._holds(t, c)

    def u_local(self, t) -> bool:
        return all(self._holds(t, e) or not self._holds(t, e.arg) for e in self.exists_u)

    def uprofile(self, t) -> frozenset:
        return frozenset(e for e in self.exists_u if e in t)

    def noms(self, t) -> frozenset:
        return frozenset(a for a in self.nominals if Nom(Ind(a)) in t)

    def compat_role(self, r, t, t2) -> bool:
        """``t -> t2`` may be an r-edge."""
        return all(e in t for e in self.exists_r if e.role == r and self._holds(t2, e.arg))

    def compat_dia(self, k, t, t2) -> bool:
        return all(e in t for e in self.dias if e.index == k and self._holds(t2, e.arg))

    def profile(self, k, t) -> frozenset:
        return frozenset(e for e in self.dias if e.index == k and e in t)

    def ci_ok(self, t) -> bool:
        if self.ontology is None:
            return True
        return all(not self._holds(t, ci.lhs) or self._holds(t, ci.rhs) for ci in self.ontology)

    def render(self, t) -> frozenset:
        """Full closure view of a type (with negations)."""
        return frozenset(c for c in self.closure if self._holds(t, c))


def enumerate_types(c0: Concept, cap: int = DEFAULT_CLOSURE_CAP) -> list:
    """All subsets of the closure satisfying the negation and conjunction
    rules, in lexicographic order of their bitsets."""
    sp = TypeSpace(c0, cap=cap)
    return [sp.render(t) for t in sp.all_types]


def _check_fragment(c, o=None, *, modal=True, nominals=True, counting=False, iota=False):
    subs = subconcepts_of([c] + ([o] if o is not None else []))
    for x in subs:
        if isinstance(x, Nom) and isinstance(x.term, Iota) and not iota:
            raise FragmentError("definite descriptions must be eliminated first")
        if isinstance(x, (ExistsDiff, ExistsOne)) and not counting:
            raise FragmentError("counting quantifiers are not supported here")
        if isinstance(x, Dia) and not modal:
            raise FragmentError("modal operators are not allowed here")
        if isinstance(x, Nom) and not nominals:
            raise FragmentError("nominals are not allowed here")


# ------------------------------------------------------------- checking

def verify_labels(m: Interpretation, space: TypeSpace, labels: dict, relevant=None) -> None:
    """Check that each recorded type agrees with the semantics.

    ``labels`` maps (world, element) to a positive-member type.  With
    ``relevant(world, concept) -> bool`` only some members are compared."""
    ev = Evaluator(m)
    for (w, d), t in labels.items():
        for c in space.pos:
            if relevant is not None and not relevant(w, c):
                continue
            sem = d in ev.ext(w, c)
            if sem != (c in t):
                raise AssertionError(f"label mismatch at world {w}, element {d}: {c}")


def _build_interp(frame, domains, labels, space, designate) -> Interpretation:
    names = sorted({c.name for c in space.pos if isinstance(c, Name)})
    concepts, roles, inds = [], [], []
    for w in range(frame.worlds):
        dom = domains[w]
        concepts.append({a: frozenset(d for d in dom if Name(a) in labels[(w, d)]) for a in names})
        roles.append({r: frozenset((d, e) for d in dom for e in dom
                                   if space.compat_role(r, labels[(w, d)], labels[(w, e)]))
                      for r in space.roles})
        inds.append(designate(w))
    return Interpretation(frame, tuple(frozenset(d) for d in domains), tuple(concepts),
                          tuple(roles), tuple(inds))


# ------------------------------------------------------------------ ALCOu

@dataclass
class AlcouResult:
    sat: bool
    model: Interpretation | None = None

    def __bool__(self):
        return self.sat


def alcou_sat(c: Concept, o: Ontology | None = None, designation: str = "total",
              cap: int = DEFAULT_CLOSURE_CAP) -> AlcouResult:
    """Type elimination for ALCO with the universal role.

    Guesses the set of true ``some u`` formulas and the nominal types,
    then removes types lacking role witnesses until nothing changes."""
    _check_fragment(c, o, modal=False)
    sp = TypeSpace(c, o, cap)
    base = [t for t in sp.all_types if sp.u_local(t) and sp.ci_ok(t)]
    for U in _subsets(sp.exists_u):
        U = frozenset(U)
        cand = [t for t in base if sp.uprofile(t) == U]
        plain = [t for t in cand if not sp.noms(t)]
        for choice in _nominal_choices(sp, cand, designation):
            alive = set(plain) | set(choice.values())
            alive = _eliminate_roles(sp, alive)
            if not alive or any(t not in alive for t in choice.values()):
                continue
            if any(not any(sp.holds(t, e.arg) for t in alive) for e in U):
                continue
            goal = [t for t in alive if sp.holds(t, c)]
            if not goal:
                continue
            return AlcouResult(True, _alcou_model(sp, alive, choice))
    return AlcouResult(False)


def realizes_quasistate(sp: TypeSpace, T) -> bool:
    """Whether one world of an ALCOu interpretation can realize exactly the
    types ``T`` (modal members are opaque).  Same answer as running
    :func:`alcou_sat` on the quasistate description, without its cost."""
    T = list(T)
    if not T or len({sp.uprofile(t) for t in T}) != 1:
        return False
    if not all(sp.u_local(t) for t in T):
        return False
    if any(sum(1 for t in T if a in sp.noms(t)) != 1 for a in sp.nominals):
        return False
    for e in sp.uprofile(T[0]):
        if not any(sp.holds(t, e.arg) for t in T):
            return False
    for t in T:
        for e in sp.exists_r:
            if e in t and not any(sp.holds(t2, e.arg) and sp.compat_role(e.role, t, t2) for t2 in T):
                return False
    return True


def _subsets(xs):
    xs = list(xs)
    for r in range(len(xs) + 1):
        yield from itertools.combinations(xs, r)


def _nominal_choices(sp, cand, designation):
    """Maps nominal -> type such that each nominal sits in exactly one type."""
    noms = sp.nominals

    def rec(i, chosen):
        if i == len(noms):
            yield dict(chosen)
            return
        a = noms[i]
        if a in chosen:
            yield from rec(i + 1, chosen)
            return
        if designation == "partial":
            yield from rec(i + 1, chosen)
        for t in cand:
            ns = sp.noms(t)
            if a not in ns or any(b in chosen for b in ns):
                continue
            # every nominal in t is realised by t, nowhere else
            upd = dict(chosen)
            for b in ns:
                upd[b] = t
            yield from rec(i + 1, upd)

    yield from rec(0, {})


def _eliminate_roles(sp, alive: set) -> set:
    alive = set(alive)
    changed = True
    while changed:
        changed = False
        for t in list(alive):
            for e in sp.exists_r:
                if e in t and not any(sp.holds(t2, e.arg) and sp.compat_role(e.role, t, t2)
                                      for t2 in alive):
                    alive.discard(t)
                    changed = True
                    break
    return alive


def _alcou_model(sp, alive, choice) -> Interpretation:
    order = sorted(alive, key=lambda t: sorted(map(str, t)))
    labels = {(0, k): t for k, t in enumerate(order)}
    idx = {t: k for k, t in enumerate(order)}
    frame = Frame(1, {})
    m = _build_interp(frame, [set(range(len(order)))], labels, sp,
                      lambda w: {a: idx[t] for a, t in choice.items()})
    verify_labels(m, sp, labels)
    return m


# --------------------------------------------------------- S5n and Kn

@dataclass
class TreeWitness:
    """A tree-shaped quasimodel and the model extracted from it."""
    kind: str
    nodes: list                 # (parent, edge index, state) per node
    model: Interpretation
    labels: dict
    depth: int
    tracked: int


@dataclass
class TreeResult:
    sat: bool
    witness: TreeWitness | None = None
    searched_tracked: int = 0

    def __bool__(self):
        return self.sat


class _TreeSearch:
    """Search for tree quasimodels of bounded depth.

    A state is ``(o, n)``: ``o`` is a set of nominal-free types whose
    elements may be duplicated freely, ``n`` is a sorted tuple of types of
    the tracked elements (those that carry nominals somewhere)."""

    def __init__(self, sp: TypeSpace, kind: str):
        self.sp = sp
        self.kind = kind
        ts = [t for t in sp.all_types if sp.u_local(t)]
        if kind == "S5":
            ts = [t for t in ts
                  if all(e in t for e in sp.dias if sp.holds(t, e.arg))]
        self.types = ts
        self.plain = [t for t in ts if not sp.noms(t)]
        self.memo: dict = {}
        self.steps = 0
        self.cap = work_cap()

    # ---- local conditions
    def valid(self, o, n) -> bool:
        sp = self.sp
        q = set(o) | set(n)
        if not q:
            return False
        U = {sp.uprofile(t) for t in q}
        if len(U) != 1:
            return False
        U = next(iter(U))
        for a in sp.nominals:
            if sum(1 for t in n if a in sp.noms(t)) != 1:
                return False
        for e in U:
            if not any(sp.holds(t, e.arg) for t in q):
                return False
        for t in q:
            for e in sp.exists_r:
                if e in t and not any(sp.holds(t2, e.arg) and sp.compat_role(e.role, t, t2) for t2 in q):
                    return False
        return True

    def tick(self):
        self.steps += 1
        if self.steps > self.cap:
            raise ResourceError(f"tree search exceeded work cap {self.cap}")

    # ---- links between a node and a child through modality k
    def link_ok(self, o, n, o2, n2, k):
        sp = self.sp
        if self.kind == "S5":
            if {sp.profile(k, t) for t in o} != {sp.profile(k, t) for t in o2}:
                return None
            return _profile_matching(sp, k, n, n2)
        for t in o:
            if not any(sp.compat_dia(k, t, t2) for t2 in o2):
                return None
        for t2 in o2:
            if not any(sp.compat_dia(k, t, t2) for t in o):
                return None
        return _perfect_matching(n, n2, lambda a, b: sp.compat_dia(k, a, b))

    def child_states(self, o, n, k):
        """Candidate child states (o2, n2, matching) reachable via k."""
        sp = self.sp
        if self.kind == "S5":
            profs = {sp.profile(k, t) for t in o}
            okt = lambda t2: sp.profile(k, t2) in profs
            per_entry = [[t2 for t2 in self.types if sp.profile(k, t2) == sp.profile(k, t)] for t in n]
        else:
            okt = lambda t2: any(sp.compat_dia(k, t, t2) for t in o)
            per_entry = [[t2 for t2 in self.types if sp.compat_dia(k, t, t2)] for t in n]
        allowed = [t2 for t2 in self.plain if okt(t2)]
        seen = set()
        for combo in itertools.product(*per_entry):
            n2 = tuple(sorted(combo, key=self.key))
            if n2 in seen:
                continue
            seen.add(n2)
            U = {sp.uprofile(t) for t in n2}
            if len(U) > 1:
                continue
            pool = [t for t in allowed if not U or sp.uprofile(t) in U]
            groups = {}
            for t in pool:
                groups.setdefault(sp.uprofile(t), []).append(t)
            for prof, grp in sorted(groups.items(), key=lambda kv: len(kv[1])) if not U else [(next(iter(U)), pool)]:
                for r in range(0 if n2 else 1, len(grp) + 1):
                    for o2 in itertools.combinations(grp, r):
                        yield frozenset(o2), n2
            if not pool and n2:
                yield frozenset(), n2

    def key(self, t):
        return self.sp.all_types.index(t)

    # ---- demands
    def demands(self, o, n, j):
        """Yields (kind, k, type, C) for every diamond demand at a node
        entered through modality ``j`` (None at the root)."""
        sp = self.sp
        mods = [k for k in sp.modalities if self.kind == "K" or k != j]
        for k in mods:
            for t in sorted(o, key=self.key):
                for e in sp.dias:
                    if e.index == k and e in t:
                        if self.kind == "S5" and sp.holds(t, e.arg):
                            continue
                        yield ("o", k, t, e.arg)
            if self.kind == "K":
                for t in sorted(set(n), key=self.key):
                    for e in sp.dias:
                        if e.index == k and e in t:
                            yield ("n", k, t, e.arg)
            else:
                for S in sorted({sp.profile(k, t) for t in n}, key=lambda s: sorted(map(str, s))):
                    group = [t for t in n if sp.profile(k, t) == S]
                    for e in S:
                        if all(sp.holds(t, e.arg) for t in group):
                            continue
                        yield ("n", k, S, e.arg)

    def serves(self, dem, o, n, o2, n2, match):
        sp = self.sp
        kind, k, t, C = dem
        if kind == "o":
            if self.kind == "S5":
                return any(sp.profile(k, t2) == sp.profile(k, t) and sp.holds(t2, C) for t2 in o2)
            return any(sp.compat_dia(k, t, t2) and sp.holds(t2, C) for t2 in o2)
        if self.kind == "S5":
            return any(sp.profile(k, t2) == t and sp.holds(t2, C) for t2 in n2)
        # K: some matching must route a t-entry to a C-entry
        return _perfect_matching(n, n2, lambda a, b: sp.compat_dia(k, a, b),
                                 route=(t, lambda b: sp.holds(b, C))) is not None

    def realizable(self, o, n, d, j):
        key = (o, n, d, j if self.kind == "S5" else None)
        if key in self.memo:
            return self.memo[key]
        self.tick()
        self.memo[key] = None           # guards against cycles (depth decreases anyway)
        plan = self._realizable(o, n, d, j)
        self.memo[key] = plan
        return plan

    def _realizable(self, o, n, d, j):
        if not self.valid(o, n):
            return None
        plan = []
        for dem in self.demands(o, n, j):
            if d == 0:
                return None
            got = self.find_child(o, n, d, dem)
            if got is None:
                return None
            plan.append((dem, got))
        return plan

    def find_child(self, o, n, d, dem):
        k = dem[1]
        for o2, n2 in self.child_states(o, n, k):
            self.tick()
            match = self.link_ok(o, n, o2, n2, k)
            if match is None or not self.valid(o2, n2):
                continue
            if not self.serves(dem, o, n, o2, n2, match):
                continue
            if self.realizable(o2, n2, d - 1, k) is not None:
                return (o2, n2)
        return None

    def roots(self, p):
        sp = self.sp
        for U in _subsets(sp.exists_u):
            U = frozenset(U)
            ts = [t for t in self.types if sp.uprofile(t) == U]
            pl = [t for t in ts if not sp.noms(t)]
            for n in itertools.combinations_with_replacement(sorted(ts, key=self.key), p):
                for r in range(0 if n else 1, len(pl) + 1):
                    for o in itertools.combinations(pl, r):
                        q = set(o) | set(n)
                        if any(sp.holds(t, sp.c0) for t in q):
                            yield frozenset(o), tuple(n)


def _perfect_matching(n, n2, ok, route=None):
    """Bijection between entries of ``n`` and ``n2`` respecting ``ok``.

    With ``route=(t, pred)`` some entry equal to ``t`` must land on an
    entry satisfying ``pred``.  Returns the list of target positions."""
    if len(n) != len(n2):
        return None
    if route is not None:
        t, pred = route
        for i, a in enumerate(n):
            if a != t:
                continue
            for j2, b in enumerate(n2):
                if pred(b) and ok(a, b):
                    rest = _perfect_matching(n[:i] + n[i + 1:], n2[:j2] + n2[j2 + 1:], ok)
                    if rest is not None:
                        rest = [x if x < j2 else x + 1 for x in rest]
                        return rest[:i] + [j2] + rest[i:]
            return None
        return None
    m = len(n)
    match_to = [-1] * m     # n2 position -> n position

    def aug(i, seen):
        for j2 in range(m):
            if j2 not in seen and ok(n[i], n2[j2]):
                seen.add(j2)
                if match_to[j2] < 0 or aug(match_to[j2], seen):
                    match_to[j2] = i
                    return True
        return False

    for i in range(m):
        if not aug(i, set()):
            return None
    out = [0] * m
    for j2, i in enumerate(match_to):
        out[i] = j2
    return out


def _profile_matching(sp, k, n, n2):
    return _perfect_matching(n, n2, lambda a, b: sp.profile(k, a) == sp.profile(k, b))


def _tree_sat(c0: Concept, kind: str, max_tracked: int | None, cap: int) -> TreeResult:
    _check_fragment(c0)
    sp = TypeSpace(c0, cap=cap)
    search = _TreeSearch(sp, kind)
    md = modal_depth(c0)
    nn = len(sp.nominals)
    if max_tracked is None:
        max_tracked = nn * (md + 1) if nn else 0
    lo = 1 if nn else 0
    for p in range(lo, max(lo, max_tracked) + 1):
        for o, n in search.roots(p):
            plan = search.realizable(o, n, md, None)
            if plan is not None:
                w = _extract_tree(search, (o, n), md)
                return TreeResult(True, w, p)
    return TreeResult(False, None, max(lo, max_tracked))


def s5n_sat(c0: Concept, max_tracked: int | None = None, cap: int = DEFAULT_CLOSURE_CAP) -> TreeResult:
    """S5 in every modality, constant domains, total designation."""
    return _tree_sat(c0, "S5", max_tracked, cap)


def kn_sat(c0: Concept, max_tracked: int | None = None, cap: int = DEFAULT_CLOSURE_CAP) -> TreeResult:
    """K in every modality, constant domains, total designation."""
    return _tree_sat(c0, "K", max_tracked, cap)


def _extract_tree(search: _TreeSearch, root, md) -> TreeWitness:
    """Unfold the plan into a tree and build runs for every element."""
    sp = search.sp
    nodes = []          # (parent, k, (o, n), d, j)
    kids = {}           # node -> list of (child, k, dem, copy)
    matchings = {}      # child -> list: parent entry position -> child entry position

    def add(parent, k, state, d, j):
        nodes.append((parent, k, state, d, j))
        me = len(nodes) - 1
        kids[me] = []
        plan = search.memo[(state[0], state[1], d, j if search.kind == "S5" else None)]
        for dem, child in plan:
            for copy in range(2):
                c = add(me, dem[1], child, d - 1, dem[1])
                kids[me].append((c, dem[1], dem, copy))
        return me

    add(None, None, root, md, None)
    # tracked runs: element ids 0..p-1
    p = len(root[1])
    tracked_pos = {0: list(range(p))}       # node -> element -> entry position
    for v in range(1, len(nodes)):
        parent, k, (o2, n2), _, _ = nodes[v]
        (o, n) = nodes[parent][2]
        dem = next(dm for c, _, dm, _ in kids[parent] if c == v)
        if dem[0] == "n" and search.kind == "K":
            mt = _perfect_matching(n, n2, lambda a, b: sp.compat_dia(k, a, b),
                                   route=(dem[2], lambda b: sp.holds(b, dem[3])))
        elif dem[0] == "n":
            mt = _s5_routed(sp, k, n, n2, dem)
        else:
            mt = search.link_ok(o, n, o2, n2, k)
        matchings[v] = mt
        tracked_pos[v] = [mt[pos] for pos in tracked_pos[parent]]

    labels = {}
    for v in range(len(nodes)):
        n = nodes[v][2][1]
        for e in range(p):
            labels[(v, e)] = n[tracked_pos[v][e]]

    # free runs: anchored at every (node, o-type); extended upward then downward
    def compatible(k, a, b):
        return sp.profile(k, a) == sp.profile(k, b) if search.kind == "S5" else sp.compat_dia(k, a, b)

    elements = p
    for v in range(len(nodes)):
        for t in sorted(nodes[v][2][0], key=search.key):
            run = {v: t}
            x = v
            while nodes[x][0] is not None:
                par, k = nodes[x][0], nodes[x][1]
                tp = next(tp for tp in sorted(nodes[par][2][0], key=search.key)
                          if compatible(k, tp, run[x]))
                run[par] = tp
                x = par
            _complete_run(search, nodes, kids, run, 0, compatible)
            for w, tw in run.items():
                labels[(w, elements)] = tw
            elements += 1

    worlds = len(nodes)
    rel = {}
    for v in range(1, worlds):
        par, k = nodes[v][0], nodes[v][1]
        rel.setdefault(k, set()).add((par, v))
    if search.kind == "S5":
        rel = {k: _equivalence(pairs, worlds) for k, pairs in rel.items()}
        for k in range(1, max(sp.modalities, default=1) + 1):
            rel.setdefault(k, {(w, w) for w in range(worlds)})
    frame = Frame(worlds, {k: frozenset(v) for k, v in rel.items()})
    dom = [set(range(elements)) for _ in range(worlds)]

    def designate(w):
        out = {}
        for e in range(p):
            for a in sp.noms(labels[(w, e)]):
                out[a] = e
        return out

    m = _build_interp(frame, dom, labels, sp, designate)
    # a node at depth h was searched with budget md - h; only members of
    # modal depth up to that budget are meaningful there
    depth = {0: 0}
    for v in range(1, worlds):
        depth[v] = depth[nodes[v][0]] + 1
    verify_labels(m, sp, labels, relevant=lambda w, c: modal_depth(c) <= md - depth[w]
                  or search.kind == "K")
    if not satisfied_at(m, 0, sp.c0):
        raise AssertionError("extracted model does not satisfy the concept at the root")
    fc = S5n(max(sp.modalities, default=1)) if search.kind == "S5" else Kn(max(sp.modalities, default=1))
    if not frame_in_class(frame, fc):
        raise AssertionError("extracted frame outside the frame class")
    return TreeWitness(search.kind, [(a, b, c) for a, b, c, _, _ in nodes], m, labels,
                       max(depth.values()), p)


def _s5_routed(sp, k, n, n2, dem):
    _, _, S, C = dem
    ok = lambda a, b: sp.profile(k, a) == sp.profile(k, b)
    for t in n:
        if sp.profile(k, t) == S and not sp.holds(t, C):
            return _perfect_matching(n, n2, ok, route=(t, lambda b: sp.holds(b, C)))
    return _perfect_matching(n, n2, ok)


def _complete_run(search, nodes, kids, run, x, compatible):
    """Fill in the run below node ``x`` honouring witness children."""
    sp = search.sp
    t = run[x]
    chosen = {}
    # first serve this run's own demands at designated children
    for c, k, dem, copy in kids[x]:
        if c in run:
            continue
        kind, _, dt, C = dem
        if kind != "o":
            continue
        mine = (dt == t) if search.kind == "K" else (sp.profile(k, dt) == sp.profile(k, t))
        if not (mine and dem[2] in t or mine):
            continue
        if not (Dia(k, C) in t and not (search.kind == "S5" and sp.holds(t, C))):
            continue
        twin = [c2 for c2, _, dm2, _ in kids[x] if dm2 == dem and c2 != c]
        if any(c2 in run and sp.holds(run[c2], C) for c2 in twin):
            continue
        if any(chosen.get(c2) is not None and sp.holds(chosen[c2], C) for c2 in twin):
            continue
        cands = [t2 for t2 in sorted(nodes[c][2][0], key=search.key)
                 if compatible(k, t, t2) and sp.holds(t2, C)]
        if cands:
            chosen[c] = cands[0]
    for c, k, dem, copy in kids[x]:
        if c not in run:
            if c in chosen:
                run[c] = chosen[c]
            else:
                run[c] = next(t2 for t2 in sorted(nodes[c][2][0], key=search.key)
                              if compatible(k, t, t2))
        _complete_run(search, nodes, kids, run, c, compatible)


def _equivalence(pairs, worlds):
    parent = list(range(worlds))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a
    for a, b in pairs:
        parent[find(a)] = find(b)
    return {(a, b) for a in range(worlds) for b in range(worlds) if find(a) == find(b)}


# --------------------------------------------------------- LTL with next

@dataclass
class RunResult:
    sat: bool
    m0: int | None = None
    runs: list = field(default_factory=list)
    nominal_runs: list = field(default_factory=list)
    model: Interpretation | None = None

    def __bool__(self):
        return self.sat


NEXT = 1


def ltl_next_sat(c0: Concept, flow: str = "finite", cap: int = DEFAULT_CLOSURE_CAP) -> RunResult:
    """Run elimination for the next-only temporal fragment, constant
    domains, total designation."""
    _check_fragment(c0)
    if any(isinstance(x, Dia) and x.index != NEXT for x in subconcepts_of(c0)):
        raise FragmentError("only the next-time operator is supported")
    if flow not in ("finite", "infinite"):
        raise ValueError("flow must be 'finite' or 'infinite'")
    sp = TypeSpace(c0, cap=cap)
    d = modal_depth(c0)
    lengths = range(0, d + 1) if flow == "finite" else [d]
    budget = [0, work_cap()]
    for m0 in lengths:
        res = _ltl_fixed(sp, m0, flow == "infinite", budget)
        if res is not None:
            return res
    return RunResult(False)


def _ltl_fixed(sp, m0, free_last, budget):
    types = [t for t in sp.all_types if sp.u_local(t)]
    nexts = [e for e in sp.dias]

    def next_ok(run):
        for i in range(m0 + 1):
            for e in nexts:
                if e in run[i]:
                    if i == m0:
                        if not free_last:
                            return False
                    elif not sp.holds(run[i + 1], e.arg):
                        return False
                elif i < m0 and sp.holds(run[i + 1], e.arg):
                    return False
        return True

    for Us in itertools.product([frozenset(s) for s in _subsets(sp.exists_u)], repeat=m0 + 1):
        per = [[t for t in types if sp.uprofile(t) == Us[i]] for i in range(m0 + 1)]
        runs = []
        for run in itertools.product(*per):
            budget[0] += 1
            if budget[0] > budget[1]:
                raise ResourceError("run enumeration exceeded work cap")
            runs.append(run)
        plain = [r for r in runs if not any(sp.noms(t) for t in r)]
        nominal = [r for r in runs if any(sp.noms(t) for t in r)]
        # runs that fail even with every candidate present can never survive
        top = _ltl_eliminate(sp, m0, set(plain) | set(nominal), next_ok)
        # elimination is monotone, so the goal must already survive here
        if not any(sp.holds(r[0], sp.c0) for r in top):
            continue
        nominal = [r for r in nominal if r in top]
        for N in _nominal_run_sets(sp, m0, nominal):
            alive = _ltl_eliminate(sp, m0, set(plain) | set(N), next_ok)
            if not all(r in alive for r in N):
                continue
            if not any(sp.holds(r[0], sp.c0) for r in alive):
                continue
            return _ltl_witness(sp, m0, alive, N, free_last)
    return None


def _ltl_eliminate(sp, m0, runs: set, next_ok) -> set:
    alive = {r for r in runs if next_ok(r)}
    changed = True
    while changed:
        changed = False
        at = [{r[i] for r in alive} for i in range(m0 + 1)]
        for r in list(alive):
            bad = False
            for i in range(m0 + 1):
                t = r[i]
                for e in sp.exists_u:
                    if e in t and not any(sp.holds(t2, e.arg) for t2 in at[i]):
                        bad = True
                        break
                if bad:
                    break
                for e in sp.exists_r:
                    if e in t and not any(sp.holds(t2, e.arg) and sp.compat_role(e.role, t, t2)
                                          for t2 in at[i]):
                        bad = True
                        break
                if bad:
                    break
            if bad:
                alive.discard(r)
                changed = True
    return alive


def _nominal_run_sets(sp, m0, candidates):
    """Sets of runs covering every (instant, nominal) cell exactly once."""
    cells = [(i, a) for i in range(m0 + 1) for a in sp.nominals]
    cover = {r: {(i, a) for i in range(m0 + 1) for a in sp.noms(r[i])} for r in candidates}

    def rec(done: set, chosen: list):
        todo = [c for c in cells if c not in done]
        if not todo:
            yield list(chosen)
            return
        cell = todo[0]
        for r in candidates:
            cv = cover[r]
            if cell in cv and not (cv & done):
                chosen.append(r)
                yield from rec(done | cv, chosen)
                chosen.pop()

    if not cells:
        yield []
        return
    yield from rec(set(), [])


def _ltl_witness(sp, m0, alive, N, free_last) -> RunResult:
    runs = sorted(alive, key=lambda r: [sp.all_types.index(t) for t in r])
    idx = {r: k for k, r in enumerate(runs)}
    labels = {(i, idx[r]): r[i] for r in runs for i in range(m0 + 1)}
    frame = chain_frame(m0 + 1)

    def designate(i):
        return {a: idx[r] for r in N for a in sp.noms(r[i])}

    m = _build_interp(frame, [set(range(len(runs)))] * (m0 + 1), labels, sp, designate)
    relevant = (lambda i, c: modal_depth(c) <= m0 - i) if free_last else None
    verify_labels(m, sp, labels, relevant)
    if not satisfied_at(m, 0, sp.c0):
        raise AssertionError("extracted model does not satisfy the concept at instant 0")
    return RunResult(True, m0, runs, sorted(N, key=lambda r: idx[r]), m)


# ------------------------------------------------------- Kf*n, budgeted

@dataclass
class KfnResult:
    sat: bool
    witness: dict | None = None
    exhausted: bool = True
    model: Interpretation | None = None

    @property
    def verdict(self) -> str:
        return "sat" if self.sat else "unsat-within-budget"

    def __bool__(self):
        return self.sat


def _tree_frames(max_worlds: int, n: int):
    """Rooted trees with labelled edges, nodes numbered in BFS order."""
    for size in range(1, max_worlds + 1):
        def rec(parents):
            if len(parents) == size - 1:
                yield list(parents)
                return
            i = len(parents) + 1
            lo = parents[-1][0] if parents else 0
            for p in range(lo, i):
                for k in range(1, n + 1):
                    if parents and p == parents[-1][0] and k < parents[-1][1]:
                        continue
                    parents.append((p, k))
                    yield from rec(parents)
                    parents.pop()
        yield from rec([])


def kfn_sat_budgeted(c0: Concept, n: int | None = None, max_worlds: int = 3,
                     max_multiplicity: int = 3, cap: int = DEFAULT_CLOSURE_CAP) -> KfnResult:
    """Finite trees, modality ``n+1`` is the proper-descendant relation,
    expanding domains, total designation.  Complete for tree models with
    at most ``max_worlds`` worlds."""
    _check_fragment(c0)
    sp = TypeSpace(c0, cap=cap)
    if n is None:
        n = max(1, max((k for k in sp.modalities), default=1) - 1)
    if any(k > n + 1 for k in sp.modalities):
        raise FragmentError(f"modality index above {n + 1}")
    types = [t for t in sp.all_types if sp.u_local(t)]
    if not any(sp.holds(t, c0) for t in types):
        return KfnResult(False)
    budget = [0, work_cap()]
    for parents in _tree_frames(max_worlds, n):
        res = _kfn_frame(sp, types, parents, n, max_multiplicity, budget)
        if res is not None:
            return res
    return KfnResult(False)


def _kfn_frame(sp, types, parents, n, max_mult, budget):
    W = len(parents) + 1
    children = {w: [] for w in range(W)}
    for v, (p, k) in enumerate(parents, start=1):
        children[p].append((v, k))
    desc = {}

    def sub(w):
        out = [w]
        for v, _ in children[w]:
            out += sub(v)
        return out
    for w in range(W):
        desc[w] = sub(w)

    def rel_succ(w, k):
        if k == n + 1:
            return desc[w][1:]
        return [v for v, kk in children[w] if kk == k]

    # runs on subtree(w): dict node -> type, built bottom-up
    def runs_from(w):
        kid_runs = [runs_from(v) for v, _ in children[w]]
        out = []
        for combo in itertools.product(*kid_runs):
            below = {}
            for part in combo:
                below.update(part)
            for t in types:
                budget[0] += 1
                if budget[0] > budget[1]:
                    raise ResourceError("run enumeration exceeded work cap")
                ok = True
                for e in sp.dias:
                    has = any(sp.holds(below[v], e.arg) for v in rel_succ(w, e.index))
                    if (e in t) != has:
                        ok = False
                        break
                if ok:
                    r = dict(below)
                    r[w] = t
                    out.append(r)
        return out

    all_runs = []
    for b in range(W):
        for r in runs_from(b):
            all_runs.append((b, tuple(sorted(r.items()))))

    for Us in itertools.product([frozenset(s) for s in _subsets(sp.exists_u)], repeat=W):
        runs = [(b, r) for b, r in all_runs if all(sp.uprofile(t) == Us[w] for w, t in r)]
        plain = [x for x in runs if not any(sp.noms(t) for _, t in x[1])]
        nominal = [x for x in runs if any(sp.noms(t) for _, t in x[1])]
        top = _kfn_eliminate(sp, W, set(plain) | set(nominal))
        if not any(b == 0 and sp.holds(dict(r)[0], sp.c0) for b, r in top):
            continue
        nominal = [x for x in nominal if x in top]
        for N in _kfn_nominal_sets(sp, W, nominal):
            alive = _kfn_eliminate(sp, W, set(plain) | set(N))
            if not all(x in alive for x in N):
                continue
            if any(not any(dict(r).get(w) is not None for _, r in alive) for w in range(W)):
                continue
            if not any(b == 0 and sp.holds(dict(r)[0], sp.c0) for b, r in alive):
                continue
            return _kfn_witness(sp, parents, n, alive, N, max_mult)
    return None


def _kfn_eliminate(sp, W, runs: set) -> set:
    alive = set(runs)
    changed = True
    while changed:
        changed = False
        at = [set() for _ in range(W)]
        for _, r in alive:
            for w, t in r:
                at[w].add(t)
        for x in list(alive):
            bad = False
            for w, t in x[1]:
                for e in sp.exists_u:
                    if e in t and not any(sp.holds(t2, e.arg) for t2 in at[w]):
                        bad = True
                        break
                if not bad:
                    for e in sp.exists_r:
                        if e in t and not any(sp.holds(t2, e.arg) and sp.compat_role(e.role, t, t2)
                                              for t2 in at[w]):
                            bad = True
                            break
                if bad:
                    break
            if bad:
                alive.discard(x)
                changed = True
    return alive


def _kfn_nominal_sets(sp, W, candidates):
    cells = [(w, a) for w in range(W) for a in sp.nominals]
    cover = {x: {(w, a) for w, t in x[1] for a in sp.noms(t)} for x in candidates}

    def rec(done, chosen):
        todo = [c for c in cells if c not in done]
        if not todo:
            yield list(chosen)
            return
        cell = todo[0]
        for x in candidates:
            cv = cover[x]
            if cell in cv and not (cv & done):
                chosen.append(x)
                yield from rec(done | cv, chosen)
                chosen.pop()

    if not cells:
        yield []
        return
    yield from rec(set(), [])


def _kfn_witness(sp, parents, n, alive, N, max_mult) -> KfnResult:
    W = len(parents) + 1
    runs = sorted(alive, key=lambda x: (x[0], [(w, sp.all_types.index(t)) for w, t in x[1]]))
    idx = {x: k for k, x in enumerate(runs)}
    labels = {}
    doms = [set() for _ in range(W)]
    for x in runs:
        for w, t in x[1]:
            labels[(w, idx[x])] = t
            doms[w].add(idx[x])
    rel = {k: set() for k in range(1, n + 2)}
    for v, (p, k) in enumerate(parents, start=1):
        rel[k].add((p, v))
    union = set().union(*(rel[k] for k in range(1, n + 1)))
    from .semantics import transitive_closure
    rel[n + 1] = set(transitive_closure(union, W))
    frame = Frame(W, {k: frozenset(v) for k, v in rel.items()})

    def designate(w):
        return {a: idx[x] for x in N for ww, t in x[1] if ww == w for a in sp.noms(t)}

    m = _build_interp(frame, doms, labels, sp, designate)
    verify_labels(m, sp, labels)
    if not satisfied_at(m, 0, sp.c0):
        raise AssertionError("extracted model does not satisfy the concept at the root")
    if not frame_in_class(frame, KfStarN(n)):
        raise AssertionError("extracted frame is not a finite strict tree")
    tindex = {t: k for k, t in enumerate(sp.all_types)}
    vectors = []
    for w in range(W):
        vec = {}
        for x in runs:
            t = dict(x[1]).get(w)
            if t is not None:
                vec[tindex[t]] = min(max_mult, vec.get(tindex[t], 0) + 1)
        vectors.append(vec)
    canonical = _canonical_report(parents, vectors, sp)
    return KfnResult(True, {"parents": parents, "vectors": vectors, "canonical": canonical,
                            "runs": len(runs)}, True, m)


def _canonical_report(parents, vectors, sp):
    """Report the canonical-form conditions on the vector quasimodel."""
    W = len(parents) + 1
    anc = {0: []}
    for v, (p, _) in enumerate(parents, start=1):
        anc[v] = anc[p] + [p]
    increasing = []
    for v in range(W):
        for w in anc[v]:
            a, b = vectors[w], vectors[v]
            if all(a.get(k, 0) <= b.get(k, 0) for k in set(a) | set(b)):
                increasing.append((w, v))
    outdeg = {w: sum(1 for p, _ in parents if p == w) for w in range(W)}
    limit = {w: len(vectors[w]) * len(sp.closure) for w in range(W)}
    return {"increasing_pairs": increasing,
            "outdegree_ok": all(outdeg[w] <= limit[w] for w in range(W))}
