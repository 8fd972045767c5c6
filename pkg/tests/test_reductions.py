import pytest

from freedl.parser import parse_concept as P, parse_ontology
from freedl.reductions import (
    ReductionError, eliminate_bot_elo, eliminate_disjunction_elo, eliminate_universal_role,
    enforce_rda_concept_total, enforce_rda_ontology, iota_pipeline_partial, iota_pipeline_total,
    iota_to_nominals_ontology, is_normal_ontology, nominals_to_iota, normalize_concept,
    normalize_ontology, partialize_concept, partialize_ontology, relativize_to_constant,
    totalize_concept, totalize_ontology,
)
from freedl.semantics import Kn, ModelBounds, oracle_sat
from freedl.syntax import CI, And, Name, has_iota, has_u


def O(text, n=1):
    return parse_ontology(f"modalities: {n}\n{text}")


def cis(o):
    return set(o.cis)


def conjuncts(c):
    if isinstance(c, And):
        return conjuncts(c.left) | conjuncts(c.right)
    return {c}


def test_rda_ontology():
    o = O("A [= {a}")
    assert cis(enforce_rda_ontology(o).output) == cis(o) | {CI(P("{a}"), P("box1 {a}"))}
    nameless = O("A [= dia1 B")
    assert enforce_rda_ontology(nameless).output == nameless


def test_rda_concept():
    c = P("dia1 some u. {a}")
    out = enforce_rda_concept_total(c)
    assert conjuncts(out) == {c, P("only u. ({a} => box1 {a})")}
    assert enforce_rda_concept_total(P("dia1 A")) == P("dia1 A")


def test_rda_concept_refuses_partial():
    with pytest.raises(ReductionError):
        enforce_rda_concept_total(P("{a}"), designation="partial")


def test_totalize():
    o = O("A [= {a}")
    assert cis(totalize_ontology(o).output) == cis(o) | {CI(P("top"), P("some u. {a}"))}
    c = P("dia1 {a}")
    assert conjuncts(totalize_concept(c).output) == {c, P("box1 some u. {a}")}
    assert totalize_concept(P("A")).output == P("A")


def test_partialize():
    r = partialize_ontology(O("{a} [= A"))
    assert r.fresh == {"N_a": "a"}
    assert cis(r.output) == {CI(Name("N_a"), Name("A")), CI(Name("N_a"), P("{a}"))}
    c = partialize_concept(P("{a}")).output
    assert conjuncts(c) == {Name("N_a"), P("only u. (N_a => {a})")}
    assert partialize_concept(P("dia1 A")).output == P("dia1 A")


def test_normalize_ontology():
    r = normalize_ontology(O("top [= dia1 (A and B)"))
    inner = next(n for n, v in r.fresh.items() if v == P("A and B"))
    outer = next(n for n in r.fresh if n != inner)
    a1, a2 = Name(inner), Name(outer)
    want = {CI(P("top"), a2), CI(a2, P(f"dia1 {inner}")), CI(P(f"dia1 {inner}"), a2),
            CI(a1, P("A and B")), CI(P("A and B"), a1)}
    assert cis(r.output) == want
    assert is_normal_ontology(r.output)
    normal = O("A [= dia1 B")
    assert normalize_ontology(normal).output.cis == normal.cis


def test_normalize_concept():
    out = normalize_concept(P("dia1 (A and B)"))
    names = sorted(n.name for n in conjuncts(out) if isinstance(n, Name))
    assert len(names) == 1
    top_name = names[0]
    inner = "A_1" if top_name == "A_2" else "A_2"
    assert conjuncts(out) == {Name(top_name), P(f"only u. (dia1 {inner} <=> {top_name})"),
                              P(f"box1 only u. ((A and B) <=> {inner})")}
    assert normalize_concept(Name("A")) == Name("A")


def test_eliminate_u():
    r = eliminate_universal_role(O("B [= some u. C"))
    role = next(k for k, v in r.fresh.items() if v == "u")
    assert cis(r.output) == {CI(Name("B"), P(f"some {role}. C"))}
    neg = eliminate_universal_role(O("some u. B [= C")).output
    assert len(neg) == 4 and not has_u(neg)
    plain = O("A [= dia1 B")
    assert eliminate_universal_role(plain).output == plain


def test_nominals_to_iota():
    assert cis(nominals_to_iota(O("{a} [= A")).output) == {CI(P("{iota N_a}"), Name("A"))}
    plain = O("A [= B")
    assert nominals_to_iota(plain).output == plain


def test_iota_to_nominals_schema():
    r = iota_to_nominals_ontology(O("A [= {iota B}\n{iota B} [= A"))
    out = r.output
    assert not has_iota(out)
    assert CI(P("B"), P("some u. ({a_B} and B)")) in cis(out)
    assert iota_to_nominals_ontology(O("A [= B")).output == O("A [= B")


def test_original_iota_pair_is_unsound():
    """The bare two-CI schema admits a model the description semantics forbids."""
    goal = P("A and some u. (B and not A)")
    src = O("A [= {iota B}\n{iota B} [= A")
    b = ModelBounds(1, 3, Kn(1), designation_mode="total")
    assert not oracle_sat(goal, src, b).sat
    naive = O("A [= (B and {a_B})\n(B and only u. (B => {a_B})) [= A")
    assert oracle_sat(goal, naive, b).sat
    g2, o2 = iota_pipeline_total(goal, src).output
    assert not oracle_sat(g2, o2, b).sat


def test_relativize():
    g, o = relativize_to_constant((P("some r. A"), None)).output
    assert conjuncts(g) == {Name("Ex"), P("some r. (Ex and A)"), P("only u. (Ex => box1 Ex)")}
    assert len(o) == 0


def test_elo_disjunction():
    r = eliminate_disjunction_elo(O("top [= (B1 or B2)", 2))
    assert len(r.output) == 4
    assert CI(P("top"), P("some q. (dia2 X_1 and dia2 X_2)")) in cis(r.output)
    same = O("A [= B", 2)
    assert cis(eliminate_disjunction_elo(same).output) == cis(same)


def test_elo_bottom():
    r = eliminate_bot_elo(O("A [= some r. B\nB [= dia2 A", 2))
    extra = cis(r.output) - cis(O("A [= some r. B\nB [= dia2 A", 2))
    assert extra == {CI(P("some r. L"), Name("L")), CI(P("dia2 L"), Name("L"))}


def test_rda_conjunct_keeps_counterexample_sat():
    c = P("only u. not {a} and box1 some u. {a}")
    c2 = And(c, P("only u. ({a} => box1 {a})"))
    assert oracle_sat(c2, None, ModelBounds(2, 2, Kn(1))).sat


def _pair(out, o):
    # an empty ontology takes the concept route and comes back bare
    return out if isinstance(out, tuple) else (out, o)


@pytest.mark.parametrize("goal,onto", [
    ("A and dia1 {a}", "A [= {a}"),
    ("some u. {iota B} and dia1 not B", "B [= dia1 {a}"),
    ("{a} and dia1 not {a}", ""),
])
def test_pipelines_equisatisfiable(goal, onto):
    g, o = P(goal), O(onto)
    b_total = ModelBounds(2, 2, Kn(1), designation_mode="total")
    b_part = ModelBounds(2, 2, Kn(1))
    g2, o2 = _pair(iota_pipeline_total(g, o).output, o)
    assert oracle_sat(g, o, b_total).sat == oracle_sat(g2, o2, ModelBounds(2, 3, Kn(1), designation_mode="total")).sat
    g3, o3 = _pair(iota_pipeline_partial(g, o).output, o)
    assert oracle_sat(g, o, b_part).sat == oracle_sat(g3, o3, ModelBounds(2, 3, Kn(1), designation_mode="partial")).sat
