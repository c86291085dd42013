import pytest
from hypothesis import given, settings

from roughel.core import (
    GCI, And, ConceptAssertion, ConceptRep, Exists, IndiscAssertion,
    KnowledgeBase, Lower, LowerRep, Name, Named, Upper, UpperRep, Var,
    make_structure,
)
from roughel.evaluator import prepare
from roughel.rewriter import rewrite
from roughel.textio import (
    ParseError, parse_concept, parse_element, parse_foquery, parse_kb,
    parse_query, parse_structure, render_element, serialize_foquery,
    serialize_kb, serialize_query, serialize_structure,
)

from conftest import KEX, PHI3, PHI4, PHI5, fuzz_kbs
from strategies import concepts, kbs, queries

A, B, C, D = (Name(n) for n in "ABCD")


def test_parse_running_example():
    kb = parse_kb(KEX)
    assert set(kb.tbox) == {GCI(D, Upper(C)), GCI(C, And(A, Lower(B)))}
    assert set(kb.abox) == {
        ConceptAssertion(C, "a"), ConceptAssertion(Upper(D), "a"),
        ConceptAssertion(Exists("r", D), "b"), IndiscAssertion("a", "b")}


def test_empty_inputs():
    assert parse_kb("") == KnowledgeBase()
    assert parse_kb("; only a comment\n") == KnowledgeBase()
    assert serialize_structure(make_structure([])) == ""


def test_duplicates_collapse():
    assert len(parse_kb("(subclass A B) (subclass A B)").tbox) == 1


@pytest.mark.parametrize("text", [
    "(subrole r rho)",
    "(assert-role rho a b)",
    "(subclass (some rho A) B)",
])
def test_rho_is_reserved(text):
    with pytest.raises(ParseError, match="reserved"):
        parse_kb(text)


def test_query_forms():
    q = parse_query("(query (x) (some-atoms (role r x y) (role s x y)))")
    assert q == parse_query(PHI3)
    assert parse_query("(query () (atom A y))").answer_vars == ()
    with pytest.raises(ParseError, match="occurs in no atom"):
        parse_query("(query (x) )")


def test_parse_error_carries_span_and_expectation():
    with pytest.raises(ParseError) as ei:
        parse_kb("(subclass A B)\n(subclass A (frob B))")
    err = ei.value
    assert (err.span.line, err.span.column) == (2, 14)
    assert err.span.start <= err.span.end
    with pytest.raises(ParseError) as ei:
        parse_kb("(subclass A")
    assert ")" in ei.value.expected


@pytest.mark.parametrize("text", ["(subclass Äpfel B)", "(subclass 1A B)"])
def test_bad_identifiers(text):
    with pytest.raises(ParseError):
        parse_kb(text)


def test_running_structure_lines(kex):
    _, s = prepare(kex)
    lines = serialize_structure(s).splitlines()
    assert "B(l[a])" in lines
    assert "rho~(a, x[D,a])" in lines
    assert lines == sorted(lines)


@pytest.mark.parametrize("e", [
    Named("a"), ConceptRep(Name("C")), ConceptRep(Exists("r", And(A, Upper(B)))),
    UpperRep(Name("C"), Named("a")), UpperRep(Lower(A), ConceptRep(Exists("r", A))),
    LowerRep(ConceptRep(And(A, B))),
])
def test_element_round_trip(e):
    assert parse_element(render_element(e)) == e


@settings(max_examples=200, deadline=None)
@given(concepts)
def test_concept_round_trip(c):
    assert parse_concept(str(c)) == c


@settings(max_examples=100, deadline=None)
@given(kbs)
def test_kb_round_trip(kb):
    text = serialize_kb(kb)
    assert parse_kb(text) == kb
    assert serialize_kb(parse_kb(text)) == text


@settings(max_examples=100, deadline=None)
@given(queries())
def test_query_round_trip(q):
    assert parse_query(serialize_query(q)) == q


def test_structure_round_trip_on_materializations():
    for kb in fuzz_kbs(25, seed=3):
        _, s = prepare(kb)
        text = serialize_structure(s)
        back = parse_structure(text)
        assert back == s
        assert serialize_structure(back) == text


@pytest.mark.parametrize("text", [PHI3, PHI4, PHI5])
def test_foquery_round_trip(text):
    fo = rewrite(parse_query(text))
    out = serialize_foquery(fo)
    assert parse_foquery(out) == fo
    assert serialize_foquery(parse_foquery(out)) == out


def test_serialization_is_deterministic(kex):
    a = serialize_structure(prepare(kex)[1])
    b = serialize_structure(prepare(parse_kb(serialize_kb(kex)))[1])
    assert a == b
