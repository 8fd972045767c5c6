import pytest

from freedl.encoders import Dec, Inc, MinskyMachine
from freedl.parser import (
    ParseError, parse_concept, parse_document, parse_minsky, parse_ontology,
    print_concept, print_minsky, print_ontology,
)
from freedl.syntax import (
    CI, And, Dia, Exists, ExistsDiff, ExistsU, Ind, Iota, Name, Nom, Not, bot, box, top,
)

A = Name("A")


def test_nested_description_under_box():
    c = parse_concept("some u. ({pierre} and box1 {iota some isGenChair. {kr24}})")
    want = ExistsU(And(Nom(Ind("pierre")),
                       box(1, Nom(Iota(Exists("isGenChair", Nom(Ind("kr24"))))))))
    assert c == want


def test_no_simplification():
    assert parse_concept("not not A") == Not(Not(A))


def test_ci_parsing():
    o = parse_ontology("A [= dia1 A")
    assert o.cis == (CI(A, Dia(1, A)),)


def test_printing():
    assert print_concept(bot()) == "bot"
    assert print_concept(top()) == "top"
    assert print_concept(Dia(1, A)) == "dia1 A"


@pytest.mark.parametrize("text", [
    "(A <=> B)", "(A => B)", "(A or B)", "only r. A", "box2 {iota A}",
    "some u. {a}", "only u. not A", "only r. bot",
])
def test_round_trip_sugar(text):
    c = parse_concept(text)
    assert parse_concept(print_concept(c)) == c
    assert print_concept(c) == text


def test_temporal_aliases():
    assert parse_concept("X A") == Dia(1, A)
    assert parse_concept("F A") == Dia(2, A)
    assert parse_concept("G A") == box(2, A)


def test_counting_tokens_need_counting_mode():
    with pytest.raises(ParseError):
        parse_concept("some!= u. A")
    assert parse_concept("some!= u. A", counting=True) == ExistsDiff(A)


def test_error_span_points_at_token():
    with pytest.raises(ParseError) as e:
        parse_concept("A and ]")
    assert e.value.span.line == 1 and e.value.span.column == 7


def test_unknown_modality_rejected():
    with pytest.raises(ParseError):
        parse_document("modalities: 1\nA [= dia2 A\n")


def test_reserved_name_rejected():
    with pytest.raises(ParseError):
        parse_concept("Falsum")


def test_document_goal_and_comments():
    doc = parse_document("# comment\nmodalities: 2\nA [= B  # trailing\nA\ndia2 B\n")
    assert doc.ontology.modality_count == 2
    assert len(doc.ontology) == 1
    assert doc.goal == And(A, Dia(2, Name("B")))


def test_ontology_round_trip():
    text = "modalities: 2\nA [= dia2 (B and {a})\nsome u. A [= not B\nA\n"
    doc = parse_document(text)
    again = parse_document(print_ontology(doc.ontology, doc.goal))
    assert again.ontology == doc.ontology and again.goal == doc.goal


def test_minsky_format():
    m = parse_minsky("states: q0 q1 q2\n0: inc r1 -> q1\n1: dec r1 -> q1 else q2\n")
    assert m == MinskyMachine(("q0", "q1", "q2"), (Inc(1, 1), Dec(1, 1, 2)))
    assert parse_minsky(print_minsky(m)) == m


def test_minsky_errors():
    with pytest.raises(ParseError):
        parse_minsky("0: inc r1 -> q1\n")
    with pytest.raises(ParseError):
        parse_minsky("states: q0 q1\n0: inc r3 -> q1\n")
    with pytest.raises(ParseError):
        parse_minsky("states: q0 q1\n0: inc r1 -> q9\n")
