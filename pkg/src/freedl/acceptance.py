"""The acceptance suite, shared by ``freedl selftest`` and the tests.

Each ``criterion_N`` returns a :class:`CriterionResult`; the instance
counts default to the full sizes and can be scaled down for quick runs.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from . import counting, decide, reductions as red
from .encoders import (Inc, MinskyMachine, check_step_property, encode_minsky,
                       encoded_configuration, Configuration)
from .parser import parse_concept, print_concept
from .sampling import Profile, Sampler, balanced
from .semantics import (Evaluator, Frame, Interpretation, Kn, LTLFinite, ModelBounds,
                        S5n, oracle_sat)
from .syntax import (And, Dia, Exists, ExistsDiff, ExistsOne, ExistsU, Iota, Name, Nom,
                     Not, Ontology, box, forall_u, implies, modal_depth, nominal,
                     relevant_paths, subconcepts, closure)


@dataclass
class Check:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def record(self, good: bool, what=None):
        self.total += 1
        if good:
            self.passed += 1
        elif len(self.failures) < 5:
            self.failures.append(what)


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list
    seconds: float = 0.0
    note: str = ""

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        parts = ", ".join(f"{c.name} {c.passed}/{c.total}" for c in self.checks)
        out = f"criterion {self.number} [{status}] {self.title}: {parts} ({self.seconds:.1f}s)"
        if self.note:
            out += f" -- {self.note}"
        return out


def _timed(fn):
    def wrapper(*a, **kw):
        t = time.perf_counter()
        r = fn(*a, **kw)
        r.seconds = time.perf_counter() - t
        return r
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _bounds(**kw):
    base = dict(max_worlds=3, max_domain=3, frame_class=Kn(2))
    base.update(kw)
    return ModelBounds(**base)


def _equivalence(check: Check, items, transform, b_in, b_out):
    for goal, o in items:
        a = oracle_sat(goal, o, b_in).sat
        g2, o2 = transform(goal, o)
        b = oracle_sat(g2, o2, b_out).sat
        check.record(a == b, (print_concept(goal), a, b))


# ---------------------------------------------------------------- 1

REDUCTION_PROFILE = Profile(names=("A", "B"), roles=("r",), inds=("a", "b"), modalities=(1, 2))
IOTA_PROFILE = Profile(names=("A", "B"), roles=("r",), inds=("a",), modalities=(1, 2), iota=True)


def reduction_cases():
    """(name, draw, transform, input bounds, output bounds) per reduction."""
    P, T = _bounds(), _bounds(designation_mode="total")

    def conc(prof):
        return lambda i: (Sampler(i, prof).concept(), None)

    def onto(prof):
        return lambda i: Sampler(i, prof).ontology()

    def normal_onto(i):
        return red.normalize_ontology(Sampler(i, REDUCTION_PROFILE).ontology()).output

    c, o = conc(REDUCTION_PROFILE), onto(REDUCTION_PROFILE)
    ic, io = conc(IOTA_PROFILE), onto(IOTA_PROFILE)
    return [
        ("enforce_rda_ontology", o, lambda g, x: red.enforce_rda_ontology((g, x)).output,
         _bounds(rda=True), P),
        ("enforce_rda_concept_total", c, lambda g, x: (red.enforce_rda_concept_total(g), None),
         _bounds(rda=True, designation_mode="total"), T),
        ("totalize_ontology", o, lambda g, x: red.totalize_ontology((g, x)).output, T, P),
        ("totalize_concept", c, lambda g, x: (red.totalize_concept(g).output, None), T, P),
        ("partialize_ontology", o, lambda g, x: red.partialize_ontology((g, x)).output, P, T),
        ("partialize_concept", c, lambda g, x: (red.partialize_concept(g).output, None), P, T),
        ("normalize_ontology", o, lambda g, x: red.normalize_ontology((g, x)).output, P, P),
        ("normalize_concept", c, lambda g, x: (red.normalize_concept(g), None), P, P),
        ("eliminate_universal_role", normal_onto,
         lambda g, x: red.eliminate_universal_role((g, x)).output, P, P),
        ("nominals_to_iota_ontology", o, lambda g, x: red.nominals_to_iota((g, x)).output, P, P),
        ("nominals_to_iota_concept", c, lambda g, x: (red.nominals_to_iota(g).output, None), P, P),
        ("iota_pipeline_total_concept", ic, lambda g, x: (red.iota_pipeline_total(g).output, None), T, T),
        ("iota_pipeline_total_ontology", io, lambda g, x: red.iota_pipeline_total(g, x).output, T, T),
        ("iota_pipeline_partial_concept", ic, lambda g, x: (red.iota_pipeline_partial(g).output, None), P, P),
        ("iota_pipeline_partial_ontology", io, lambda g, x: red.iota_pipeline_partial(g, x).output, P, P),
        ("relativize_concept", c, lambda g, x: red.relativize_to_constant((g, x)).output,
         _bounds(domain_mode="expanding"), P),
        ("relativize_ontology", o, lambda g, x: red.relativize_to_constant((g, x)).output,
         _bounds(domain_mode="expanding"), P),
    ]


@_timed
def criterion_1(n: int = 300, only=None) -> CriterionResult:
    """Each reduction preserves oracle verdicts on balanced random inputs."""
    checks = []
    for name, draw, transform, b_in, b_out in reduction_cases():
        if only and name not in only:
            continue
        ch = Check(name)
        items = balanced(draw, lambda x, b=b_in: oracle_sat(x[0], x[1], b).sat, n)
        _equivalence(ch, items, transform, b_in, b_out)
        checks.append(ch)
    return CriterionResult(1, "reduction equivalence", checks)


# ---------------------------------------------------------------- 2

def rda_counterexample():
    c = And(forall_u(Not(nominal("a"))), box(1, ExistsU(nominal("a"))))
    c2 = And(c, forall_u(implies(nominal("a"), box(1, nominal("a")))))
    return c, c2


@_timed
def criterion_2() -> CriterionResult:
    """The partial-designation RDA counterexample, checked literally."""
    c, c2 = rda_counterexample()
    b = ModelBounds(4, 2, Kn(1))
    sat_c2 = Check("C' sat (partial)")
    sat_c2.record(oracle_sat(c2, None, b).sat)
    unsat_c = Check("C unsat (partial+RDA)")
    r = oracle_sat(c, None, ModelBounds(4, 2, Kn(1), rda=True))
    unsat_c.record(not r.sat, "witness found" if r.sat else None)
    refuse = Check("refuses partial mode")
    try:
        red.enforce_rda_concept_total(c, designation="partial")
        refuse.record(False, "no error")
    except red.ReductionError as e:
        refuse.record(e.code == "PARTIAL_MODE", e.code)
    note = ""
    if r.sat:
        w = r.witness
        note = (f"claim refuted: C has a {len(list(w.worlds))}-world RDA model in which "
                f"'a' is undefined and no world has a successor, so the box is vacuous")
    return CriterionResult(2, "RDA counterexample", [sat_c2, unsat_c, refuse], note=note)


# ---------------------------------------------------------------- 3

LTL_PROFILE = Profile(names=("A", "B"), roles=("r",), inds=("a", "b"), modalities=(1,))


@_timed
def criterion_3(n: int = 300) -> CriterionResult:
    """Next-only run elimination against the oracle on finite flows."""
    def bounds(c):
        d = modal_depth(c)
        return ModelBounds(d + 1, 3, LTLFinite(d + 1), designation_mode="total")

    items = balanced(lambda i: Sampler(i, LTL_PROFILE).concept(),
                     lambda c: oracle_sat(c, None, bounds(c)).sat, n)
    ch = Check("finite flow")
    for c in items:
        a = oracle_sat(c, None, bounds(c)).sat
        b = decide.ltl_next_sat(c, "finite").sat
        ch.record(a == b, (print_concept(c), a, b))
    return CriterionResult(3, "next-only LTL vs oracle", [ch])


# ---------------------------------------------------------------- 4

MODAL_PROFILE = Profile(names=("A", "B"), roles=("r",), inds=("a",), modalities=(1, 2))


@_timed
def criterion_4(n: int = 200) -> CriterionResult:
    """Tree quasimodel search for S5 and K against the oracle."""
    checks = []
    for label, fc, proc in (("s5n", S5n(2), decide.s5n_sat), ("kn", Kn(2), decide.kn_sat)):
        b = ModelBounds(3, 3, fc, designation_mode="total")
        items = balanced(lambda i: Sampler(i, MODAL_PROFILE).concept(),
                         lambda c: oracle_sat(c, None, b).sat, n)
        agree, witness = Check(f"{label} verdicts"), Check(f"{label} witnesses")
        for c in items:
            a = oracle_sat(c, None, b).sat
            r = proc(c)
            agree.record(a == r.sat, (print_concept(c), a, r.sat))
            if r.sat:
                w = r.witness
                good = (w.depth <= modal_depth(c)
                        and Evaluator(w.model).ext(0, c) != frozenset())
                witness.record(good, print_concept(c))
        checks += [agree, witness]
    return CriterionResult(4, "S5n/Kn vs oracle", checks)


# ---------------------------------------------------------------- 5

M1 = MinskyMachine(("q0", "q1"), (Inc(1, 1),))
M2 = MinskyMachine(("q0", "q1"), (Inc(1, 0),))


@_timed
def criterion_5(max_length: int = 5) -> CriterionResult:
    """Halting machine satisfiable, looping machine not, step property."""
    o1, g1 = encode_minsky(M1, "finite")
    r = oracle_sat(g1, o1, ModelBounds(2, 3, LTLFinite(2)))
    m1 = Check("M1 sat")
    m1.record(r.sat)
    step = Check("M1 step property")
    if r.sat:
        w = r.witness
        good = (check_step_property(w, M1)
                and encoded_configuration(w, 0, M1) == Configuration(0, 0, 0)
                and (len(list(w.worlds)) < 2 or encoded_configuration(w, 1, M1) == Configuration(1, 1, 0)))
        step.record(good)
    o2, g2 = encode_minsky(M2, "finite")
    m2 = Check("M2 unsat")
    for k in range(1, max_length + 1):
        m2.record(not oracle_sat(g2, o2, ModelBounds(k, 3, LTLFinite(k))).sat, k)
    return CriterionResult(5, "Minsky fixtures", [m1, step, m2])


# ---------------------------------------------------------------- 6

DIFF_PROFILE = Profile(names=("A", "B"), roles=(), inds=(), modalities=(1,), counting=True,
                       max_closure=6)
ALCOU_PROFILE = Profile(names=("A", "B"), roles=("r",), inds=("a",), modalities=(1,), max_closure=6)


def one_world_models(names=("A", "B"), max_domain=4):
    for size in range(1, max_domain + 1):
        dom = frozenset(range(size))
        subsets = [frozenset(s) for k in range(size + 1) for s in itertools.combinations(range(size), k)]
        for ext in itertools.product(subsets, repeat=len(names)):
            yield Interpretation(Frame(1, {}), (dom,), (dict(zip(names, ext)),), ({},), ({},))


def _small_bodies():
    a, b = Name("A"), Name("B")
    return [a, b, Not(a), And(a, b), And(a, Not(b)), Not(And(a, b))]


@_timed
def criterion_6(n: int = 100) -> CriterionResult:
    """Counting quantifiers: interdefinability and both translations."""
    inter = Check("interdefinability")
    for m in one_world_models():
        ev = Evaluator(m)
        for c in _small_bodies():
            one = ExistsOne(c)
            diff = ExistsDiff(c)
            via_diff = ExistsU(And(c, Not(diff)))
            via_one = And(ExistsU(c), implies(c, Not(one)))
            ok = (counting.diff_extension(m, 0, one) == counting.diff_extension(m, 0, via_diff)
                  and counting.diff_extension(m, 0, diff) == counting.diff_extension(m, 0, via_one)
                  and counting.diff_extension(m, 0, diff) == ev.ext(0, diff)
                  and counting.diff_extension(m, 0, one) == ev.ext(0, one))
            inter.record(ok, print_concept(c))
    fwd = Check("to ALCOu")
    b = ModelBounds(2, 3, Kn(1))
    items = balanced(lambda i: Sampler(i, DIFF_PROFILE).concept(),
                     lambda c: oracle_sat(c, None, b).sat, n)
    for c in items:
        a = oracle_sat(c, None, b).sat
        out = counting.mldiff_to_mlalcou(c).output
        fwd.record(a == oracle_sat(out, None, b).sat, print_concept(c))
    bwd = Check("to counting")
    bt = ModelBounds(2, 3, Kn(1), designation_mode="total")
    items = balanced(lambda i: Sampler(i, ALCOU_PROFILE).ontology(cis=1),
                     lambda x: oracle_sat(x[0], x[1], bt).sat, n)
    for g, o in items:
        a = oracle_sat(g, o, bt).sat
        cands, o2 = counting.mlalcou_to_mldiff(g, o)
        bb = any(oracle_sat(t, o2, b).sat for t in cands)
        bwd.record(a == bb, print_concept(g))
    return CriterionResult(6, "counting bridge", [inter, fwd, bwd])


# ---------------------------------------------------------------- 7

SYNTAX_PROFILE = Profile(names=("A", "B", "C"), roles=("r", "s"), inds=("a", "b"),
                         modalities=(1, 2, 3), iota=True, counting=True, max_closure=40,
                         max_depth=4)


def rp_laws(c, x) -> bool:
    """The inclusion laws for relevant paths that apply to ``x``'s shape."""
    rp = lambda b: relevant_paths(c, b)
    ok = all(len(p) <= modal_depth(c) for p in rp(x))
    if isinstance(x, Nom) and isinstance(x.term, Iota):
        ok &= rp(x) <= rp(x.term.body)
    if isinstance(x, Not):
        ok &= rp(x) <= rp(x.arg)
    if isinstance(x, And):
        ok &= rp(x) <= (rp(x.left) & rp(x.right))
    if isinstance(x, Exists):
        ok &= rp(x) <= rp(x.arg)
    if isinstance(x, Dia):
        inner = rp(x.arg)
        ok &= all(p + (x.index,) in inner for p in rp(x))
    return ok


@_timed
def criterion_7(n: int = 1000, seed: int = 7) -> CriterionResult:
    """Printing then parsing is the identity; relevant-path laws hold."""
    rt = Check("round trip")
    laws = Check("relevant-path laws")
    rng = random.Random(seed)
    for i in range(n):
        c = Sampler(seed * 100003 + i, SYNTAX_PROFILE).concept(rng.randint(2, 14))
        rt.record(parse_concept(print_concept(c), counting=True) == c, print_concept(c))
        subs = sorted(subconcepts(c), key=print_concept)
        x = rng.choice(subs)
        laws.record(rp_laws(c, x), (print_concept(c), print_concept(x)))
    return CriterionResult(7, "syntax properties", [rt, laws])


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


def run_all(quick: bool = False, out=print) -> list:
    """Run every criterion; ``quick`` shrinks the instance counts."""
    sizes = {1: 20, 3: 30, 4: 20, 6: 20, 7: 100} if quick else {}
    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        r = fn(sizes[k]) if k in sizes else fn()
        results.append(r)
        out(r.line())
    return results
