import pytest
from hypothesis import given, settings

from conftest import concepts, models
from freedl.parser import parse_concept
from freedl.semantics import (
    UNDEFINED, CI, Frame, Interpretation, KStarN, Kn, LTLFinite, ModelBounds, S5n, Signature,
    chain_frame, enumerate_models, extension, frame_in_class, model_properties, oracle_sat,
    satisfied_at, satisfies_ci, term_value, transitive_closure,
)
from freedl.syntax import (
    And, Dia, ExistsDiff, ExistsOne, ExistsU, Ind, Iota, Name, Nom, Not, bot, box, top,
)
from freedl.syntax import Ontology

A, C = Name("A"), Name("C")


def one_world(A_ext, dom=(0, 1), inds=None):
    return Interpretation(Frame(1, {1: frozenset()}), (frozenset(dom),),
                          ({"A": frozenset(A_ext)},), ({},), (inds or {},))


def shifting():
    """a denotes 0 at world 0 and 1 at world 1, with 0 R1 1."""
    return Interpretation(Frame(2, {1: frozenset({(0, 1)})}),
                          (frozenset({0, 1}),) * 2, ({}, {}), ({}, {}),
                          ({"a": 0}, {"a": 1}))


def test_term_value():
    assert term_value(one_world({0}), 0, Iota(A)) == 0
    assert term_value(one_world({0, 1}), 0, Iota(A)) is UNDEFINED
    assert term_value(one_world({0}), 0, Ind("a")) is UNDEFINED


def test_extension_examples():
    assert extension(one_world({0}), 0, Nom(Ind("a"))) == frozenset()
    m = Interpretation(chain_frame(2), (frozenset({0}),) * 2, ({"A": frozenset({0})},) * 2,
                       ({}, {}), ({}, {}))
    assert extension(m, 0, Dia(1, A)) == {0}
    assert extension(m, 1, Dia(1, A)) == frozenset()
    assert extension(one_world({1}), 0, Not(A)) == {0}


def test_satisfaction():
    m = one_world({0})
    assert satisfies_ci(m, CI(top(), top()))
    assert not satisfies_ci(m, CI(A, bot()))
    assert satisfied_at(m, 0, A)
    a = Nom(Ind("a"))
    assert not satisfies_ci(shifting(), CI(a, box(1, a)))


def test_model_properties():
    p = model_properties(one_world({0}, inds={"a": 0}))
    assert p.is_total and p.is_rda and p.is_constant_domain
    undesignated = Interpretation(Frame(2, {1: frozenset({(0, 1)})}), (frozenset({0}),) * 2,
                                  ({}, {}), ({}, {}), ({}, {}))
    assert model_properties(undesignated, names={"a"}).is_rda
    assert not model_properties(undesignated, names={"a"}).is_total
    assert not model_properties(shifting()).is_rda


def test_enumerate_models_count():
    sig = Signature(frozenset({"A"}), frozenset(), frozenset({"a"}))
    for fc in (S5n(1), LTLFinite(1)):
        b = ModelBounds(1, 1, fc, designation_mode="total")
        assert len(list(enumerate_models(sig, b))) == 2


def test_enumerate_models_kn_has_reflexive_variant():
    # in Kn the single world may or may not see itself
    sig = Signature(frozenset({"A"}), frozenset(), frozenset({"a"}))
    b = ModelBounds(1, 1, Kn(1), designation_mode="total")
    assert len(list(enumerate_models(sig, b))) == 4


def test_oracle_basics():
    for b in (ModelBounds(1, 1), ModelBounds(2, 2), ModelBounds(2, 2, S5n(1), "expanding")):
        assert not oracle_sat(And(A, Not(A)), None, b)
    r = oracle_sat(A, None, ModelBounds(1, 1))
    assert r.sat and r.witness.frame.worlds == 1
    assert r.verdict == "sat"


def test_rda_separates():
    c = parse_concept("some u. ({a} and box1 C) and dia1 some u. ({a} and not C)")
    b = ModelBounds(2, 2, Kn(1))
    assert oracle_sat(c, None, b).sat
    assert not oracle_sat(c, None, ModelBounds(2, 2, Kn(1), rda=True)).sat


def test_engines_agree_small():
    for text in ("A and dia1 not A", "{a} and dia1 not {a}", "some u. {iota A} and not A"):
        c = parse_concept(text)
        b = ModelBounds(2, 2, Kn(1))
        assert oracle_sat(c, None, b).sat == oracle_sat(c, None, b, engine="enumerate").sat


def test_frames():
    assert frame_in_class(chain_frame(3), LTLFinite(3))
    assert frame_in_class(chain_frame(2), LTLFinite(3))
    assert not frame_in_class(chain_frame(4), LTLFinite(3))
    tc = transitive_closure({(0, 1), (1, 2)}, 3)
    assert tc == {(0, 1), (1, 2), (0, 2)}
    f = Frame(3, {1: frozenset({(0, 1), (1, 2)}), 2: tc})
    assert frame_in_class(f, KStarN(1))
    assert not frame_in_class(Frame(3, {1: f.relations[1], 2: frozenset()}), KStarN(1))


def test_bounds_validation():
    with pytest.raises(ValueError):
        ModelBounds(0, 1)
    with pytest.raises(ValueError):
        ModelBounds(1, 1, domain_mode="varying")


def test_ontology_witness_checked():
    o = Ontology((CI(top(), Dia(1, top())),), 1)
    r = oracle_sat(A, o, ModelBounds(2, 1, Kn(1)))
    assert r.sat
    assert all(r.witness.frame.successors(1, w) for w in r.witness.worlds)


@settings(max_examples=150, deadline=None)
@given(models(), concepts(), concepts())
def test_de_morgan(m, c, d):
    for w in m.worlds:
        assert extension(m, w, Not(And(c, d))) == extension(m, w, Not(c)) | extension(m, w, Not(d))


@settings(max_examples=150, deadline=None)
@given(models(), concepts())
def test_exactly_one_interdefinable(m, c):
    alt = ExistsU(And(c, Not(ExistsDiff(c))))
    for w in m.worlds:
        assert extension(m, w, ExistsOne(c)) == extension(m, w, alt)


@settings(max_examples=100, deadline=None)
@given(models(), concepts())
def test_extension_within_domain(m, c):
    for w in m.worlds:
        assert extension(m, w, c) <= m.domains[w]
