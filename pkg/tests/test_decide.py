import pytest
from hypothesis import given, settings, strategies as st

from freedl.decide import (
    CapError, FragmentError, TypeSpace, alcou_sat, enumerate_types, kfn_sat_budgeted, kn_sat,
    ltl_next_sat, s5n_sat,
)
from freedl.parser import parse_concept as P, parse_ontology
from freedl.sampling import Profile, Sampler
from freedl.semantics import (
    KfStarN, Kn, LTLFinite, LTLInfinitePrefix, ModelBounds, S5n, check_witness, oracle_sat,
)
from freedl.syntax import And, Name, Not, Ontology, closure

A, B = Name("A"), Name("B")
EMPTY = Ontology((), 1)


def test_types_of_name():
    ts = enumerate_types(A)
    assert sorted(map(len, ts)) == [1, 1]
    assert {frozenset({A}), frozenset({Not(A)})} == set(ts)


def test_types_of_conjunction():
    ab = And(A, B)
    ts = enumerate_types(ab)
    assert len(ts) == 4
    for t in ts:
        assert (ab in t) == (A in t and B in t)
        for c in closure(ab):
            assert (c in t) != (Not(c) in t) or isinstance(c, Not)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_type_invariants(seed):
    c = Sampler(seed, Profile(max_closure=10)).concept()
    cl = closure(c)
    ts = enumerate_types(c)
    assert len(ts) <= 2 ** (len(cl) // 2)
    for t in ts:
        for d in cl:
            if not isinstance(d, Not):
                assert (d in t) != (Not(d) in t)
            if isinstance(d, And):
                assert (d in t) == (d.left in t and d.right in t)


def test_cap():
    with pytest.raises(CapError):
        TypeSpace(P("A and B and {a} and some r. B and some u. not A"), cap=4)


def _witness_ok(model, c, bounds):
    return check_witness(model, c, EMPTY, bounds) is not None


def test_alcou_examples():
    assert not alcou_sat(P("A and not A"))
    o = parse_ontology("{a} [= not A")
    assert not alcou_sat(P("{a} and A"), o)
    r = alcou_sat(P("{a} and some r. ({b} and not A) and some u. A"))
    assert r.sat
    assert _witness_ok(r.model, P("{a} and some r. ({b} and not A) and some u. A"),
                       ModelBounds(1, 8, Kn(1), designation_mode="total"))


def test_alcou_rejects_modalities():
    with pytest.raises(FragmentError):
        alcou_sat(P("dia1 A"))


@pytest.mark.parametrize("solver,fc", [(s5n_sat, S5n(1)), (kn_sat, Kn(1))])
def test_tree_examples(solver, fc):
    c = P("dia1 A and dia1 not A")
    r = solver(c)
    assert r.sat
    assert _witness_ok(r.witness.model, c, ModelBounds(8, 8, fc, "constant", "total"))
    assert not solver(P("box1 A and dia1 not A"))
    assert not solver(P("some u. ({a} and A) and some u. ({a} and not A)"))


def test_s5_and_k_differ():
    # reflexivity: box A forces A at the current world in S5 only
    c = P("box1 A and not A")
    assert s5n_sat(c).sat is False
    assert kn_sat(c).sat is True


def test_tree_rejects_descriptions():
    with pytest.raises(FragmentError):
        kn_sat(P("{iota A}"))


def test_ltl_examples():
    assert not ltl_next_sat(P("A and not A"))
    r = ltl_next_sat(P("A and dia1 not A"))
    assert r.sat and r.m0 == 1
    assert not ltl_next_sat(P("dia1 A and not dia1 top"))
    assert ltl_next_sat(P("not dia1 top")).sat
    assert not ltl_next_sat(P("not dia1 top"), flow="infinite")
    with pytest.raises(FragmentError):
        ltl_next_sat(P("dia2 A"))


def test_ltl_model_checks():
    c = P("{a} and dia1 (A and not {a}) and some u. ({a} and dia1 not A)")
    for flow, fc in (("finite", LTLFinite(4)), ("infinite", LTLInfinitePrefix(3))):
        r = ltl_next_sat(c, flow)
        want = oracle_sat(c, None, ModelBounds(4, 3, fc, "constant", "total")).sat
        assert r.sat == want
        if r.sat and flow == "finite":
            assert _witness_ok(r.model, c, ModelBounds(8, 8, LTLFinite(8), "constant", "total"))


def test_kfn_examples():
    assert kfn_sat_budgeted(P("dia1 A and dia1 not A"), n=1).sat
    r = kfn_sat_budgeted(P("dia2 dia2 dia2 A"), n=1, max_worlds=3)
    assert not r.sat and r.verdict == "unsat-within-budget"
    assert kfn_sat_budgeted(P("dia2 dia2 dia2 A"), n=1, max_worlds=4).sat


def test_kfn_witness_is_model():
    c = P("{a} and dia2 (A and {a}) and box1 not A")
    r = kfn_sat_budgeted(c, n=1, max_worlds=3)
    assert r.sat
    b = ModelBounds(3, 8, KfStarN(1), "expanding", "total")
    assert _witness_ok(r.model, c, b)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_kfn_agrees_with_kn_on_dia_free_seeds(seed):
    c = Sampler(seed, Profile(max_closure=10, inds=("a",))).concept()
    if not kn_sat(c).sat:
        return
    assert kfn_sat_budgeted(c, n=1, max_worlds=4).sat


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_kfn_complete_for_small_oracle_models(seed):
    c = Sampler(seed, Profile(max_closure=10, modalities=(1, 2), max_depth=2)).concept()
    b = ModelBounds(3, 2, KfStarN(1), "expanding", "total")
    if oracle_sat(c, None, b).sat:
        assert kfn_sat_budgeted(c, n=1, max_worlds=4).sat


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_tree_witnesses_are_models(seed):
    c = Sampler(seed, Profile(max_closure=10)).concept()
    for solver, fc in ((s5n_sat, S5n(1)), (kn_sat, Kn(1))):
        r = solver(c)
        if r.sat:
            assert _witness_ok(r.witness.model, c, ModelBounds(16, 16, fc, "constant", "total"))
