from freedl.syntax import (
    CI, And, Dia, Exists, ExistsU, FALSUM, Ind, Iota, Name, NameSupply, Nom, Not, Ontology,
    Signature, bot, box, box_path, closure, desugar_assertion, forall_u, fresh_name, iff,
    modal_depth, relevant_paths, subconcepts, substitute, top,
)
import pytest

A, B = Name("A"), Name("B")


def test_subconcepts_examples():
    assert subconcepts(A) == {A}
    assert subconcepts(Not(A)) == {Not(A), A}
    d = Nom(Iota(And(A, B)))
    assert subconcepts(d) == {d, And(A, B), A, B}


def test_subconcepts_idempotent():
    c = And(Dia(1, Not(A)), Exists("r", Nom(Iota(B))))
    subs = subconcepts(c)
    assert set().union(*(subconcepts(d) for d in subs)) == subs


def test_modal_depth():
    assert modal_depth(A) == 0
    assert modal_depth(Dia(1, Dia(2, A))) == 2
    assert modal_depth(And(Nom(Iota(Dia(1, A))), B)) == 1
    o = Ontology((CI(A, Dia(1, Dia(1, B))),), 1)
    assert modal_depth(o) == 2


def test_closure_examples():
    assert closure(A) == {A, Not(A)}
    ab = And(A, B)
    assert closure(ab) == {ab, Not(ab), A, Not(A), B, Not(B)}
    assert closure(Not(A)) == {Not(A), A}


def test_relevant_paths_mixed_modalities():
    d = And(Dia(1, Not(A)), Dia(2, Dia(3, A)))
    assert relevant_paths(d, A) == {(1,), (2, 3)}
    assert relevant_paths(d, Not(A)) == {(1,)}
    assert relevant_paths(A, A) == {()}
    assert relevant_paths(A, B) == frozenset()


def test_box_path():
    assert box_path((), A) == A
    assert box_path((1, 2), A) == box(1, box(2, A))
    e = forall_u(iff(A, B))
    assert box_path((2,), e) == box(2, e)


def test_substitute():
    assert substitute(Dia(1, B), B, A) == Dia(1, A)
    assert substitute(And(B, Not(B)), B, A) == And(A, Not(A))
    c = Name("C")
    assert substitute(c, B, A) == c
    d = And(Dia(1, B), Exists("r", Not(B)))
    assert substitute(substitute(d, B, A), A, B) == d


def test_desugar_assertions():
    busy = desugar_assertion("concept", Name("Busy"), "pierre")
    assert busy == ExistsU(And(Nom(Ind("pierre")), Name("Busy")))
    chair = desugar_assertion("role", "isGenChair", "pierre", "kr24")
    assert chair == ExistsU(And(Nom(Ind("pierre")), Exists("isGenChair", Nom(Ind("kr24")))))
    assert desugar_assertion("concept", top(), "a") == ExistsU(And(Nom(Ind("a")), top()))


def test_bottom_uses_reserved_name():
    assert bot() == And(Name(FALSUM), Not(Name(FALSUM)))
    assert top() == Not(bot())


def test_fresh_names():
    assert fresh_name("N_a", Signature()) == "N_a"
    assert fresh_name("N_a", Signature(frozenset({"N_a"}))) == "N_a_1"
    used = {"N_a"}
    seen = set()
    for _ in range(5):
        n = fresh_name("N_a", used)
        assert n not in used and n not in seen
        used.add(n)
        seen.add(n)


def test_name_supply_numbered():
    s = NameSupply()
    s.reserve(Name("A_1"))
    assert s.numbered("A") == "A_2"
    assert s.numbered("A") == "A_3"


def test_ontology_checks_modalities():
    with pytest.raises(ValueError):
        Ontology((CI(A, Dia(2, B)),), 1)
    o = Ontology((CI(A, B),), 2).extend([CI(B, Dia(2, A))])
    assert len(o) == 2
