import pytest
from hypothesis import given, settings, strategies as st

from conftest import models
from freedl.counting import (
    abstract_description, diff_extension, mlalcou_to_mldiff, mldiff_to_mlalcou,
    quasistate_description, realizable_quasistates,
)
from freedl.decide import CapError, alcou_sat, realizes_quasistate
from freedl.parser import parse_concept, parse_ontology
from freedl.reductions import ReductionError
from freedl.sampling import Profile, Sampler
from freedl.semantics import Frame, Interpretation, Kn, ModelBounds, extension, oracle_sat
from freedl.syntax import CI, And, ExistsDiff, ExistsOne, Name, Not, top

A, B = Name("A"), Name("B")


def P(text):
    return parse_concept(text, counting=True)


def one_world(a_ext, dom=(0, 1, 2)):
    return Interpretation(Frame(1, {1: frozenset()}), (frozenset(dom),),
                          ({"A": frozenset(a_ext)},), ({},), ({},))


def test_diff_extension_examples():
    d = ExistsDiff(A)
    assert diff_extension(one_world({0}), 0, d) == {1, 2}
    assert diff_extension(one_world(set()), 0, d) == frozenset()
    assert diff_extension(one_world({0, 1}), 0, d) == {0, 1, 2}
    for ext in (set(), {0}, {0, 1}):
        m = one_world(ext)
        assert diff_extension(m, 0, d) == extension(m, 0, d)
        assert diff_extension(m, 0, ExistsOne(A)) == extension(m, 0, ExistsOne(A))


def test_quasistate_description_examples():
    both = quasistate_description([frozenset({A}), frozenset({Not(A)})])
    assert both == P("only u. (A or not A) and (some u. A and some u. not A)")
    assert quasistate_description([frozenset({A})]) == P("only u. A and some u. A")


@settings(max_examples=150, deadline=None)
@given(models(max_domain=3), st.sets(st.sampled_from([frozenset({A}), frozenset({Not(A)})]),
                                     min_size=1))
def test_description_holds_iff_type_set_matches(m, T):
    xi = quasistate_description(sorted(T, key=str))
    for w in m.worlds:
        ext = extension(m, w, A)
        realized = {frozenset({A}) if d in ext else frozenset({Not(A)}) for d in m.domains[w]}
        assert bool(extension(m, w, xi)) == (realized == T)


def test_diff_to_alcou_example():
    o = parse_ontology("top [= some!= u. B", counting=True)
    r = mldiff_to_mlalcou(o)
    assert set(r.output.cis) == {
        CI(top(), P("some u. B and ({a_B} => some u. (not {a_B} and B))")),
        CI(B, P("some u. ({a_B} and B)")),
    }
    plain = parse_ontology("A [= some u. B")
    assert mldiff_to_mlalcou(plain).output == plain


def test_alcou_to_diff_identity_sharp():
    o = parse_ontology("A [= B")
    cands, o2 = mlalcou_to_mldiff(A, o)
    assert o2.cis[0] == CI(A, B)
    assert len(o2) == 2 and o2.cis[1].lhs == top()
    assert cands == [And(A, B)]


def test_alcou_to_diff_nominal():
    cands, o2 = mlalcou_to_mldiff(A, parse_ontology("top [= some u. {a}"))
    assert CI(top(), P("some=1 u. N_a")) in o2.cis


def test_closure_cap():
    o = parse_ontology("A [= some r. (B and {a})\nB [= some s. not A\n{b} [= some u. C")
    with pytest.raises(ReductionError) as e:
        mlalcou_to_mldiff(A, o, cap=4)
    assert e.value.code == "CLOSURE_TOO_LARGE"


DIFF = Profile(names=("A", "B"), roles=("r",), inds=("a",), modalities=(), counting=True,
               max_closure=10, max_depth=0)
PLAIN = Profile(names=("A", "B"), roles=("r",), inds=("a",), modalities=(1,), max_closure=6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_diff_to_alcou_equisatisfiable(seed):
    c = Sampler(seed, DIFF).concept()
    b = ModelBounds(1, 3, Kn(1))
    out = mldiff_to_mlalcou(c).output
    assert oracle_sat(c, None, b).sat == oracle_sat(out, None, b).sat


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_alcou_to_diff_equisatisfiable(seed):
    g, o = Sampler(seed, PLAIN).ontology(cis=1)
    bt = ModelBounds(1, 3, Kn(1), designation_mode="total")
    cands, o2 = mlalcou_to_mldiff(g, o)
    want = oracle_sat(g, o, bt).sat
    assert want == any(oracle_sat(t, o2, ModelBounds(1, 3, Kn(1))).sat for t in cands)


def test_realizability_two_routes():
    """Direct realizability agrees with type elimination on the abstraction."""
    checked = 0
    for seed in range(30):
        g, o = Sampler(seed, PLAIN).ontology(cis=1)
        sp, Ts = realizable_quasistates(g, o)
        for T in Ts:
            assert realizes_quasistate(sp, T)
            try:
                assert alcou_sat(abstract_description(sp, T), cap=30).sat
            except CapError:
                continue
            checked += 1
    assert checked >= 20
