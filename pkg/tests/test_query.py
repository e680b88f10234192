from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, data_with_ontology
from oracles import brute_force_query, random_graph, random_query, shuffled_query
from nfdi_forge.errors import QuerySyntaxError, UnsupportedFeatureError
from nfdi_forge.graph import Graph, PrefixMap
from nfdi_forge.ontology import extract_schema
from nfdi_forge.query import TriplePattern, Var, evaluate, parse_query
from nfdi_forge.rules import materialize, merged_graph
from nfdi_forge.terms import BlankNode, Iri, Literal, Triple
from nfdi_forge.vocab import IAO, NFDICORE

EX = "https://example.org/nfdi/"
COMPLEX = (FIXTURES / "queries" / "contact-point-complex.rq").read_text()
SHORTCUT = (FIXTURES / "queries" / "contact-point-shortcut.rq").read_text()
EQUIVALENCE = sorted((FIXTURES / "equivalence").glob("*.ttl"))


def test_contact_point_queries_parse():
    complex_q, shortcut_q = parse_query(COMPLEX), parse_query(SHORTCUT)
    assert len(complex_q.patterns) == 6
    assert len(shortcut_q.patterns) == 2
    assert complex_q.projection == ("contactPoint", "service")
    assert shortcut_q.projection == ("service", "contactPoint")


def test_star_query():
    q = parse_query("SELECT * WHERE { ?s ?p ?o . }")
    assert q.star and len(q.patterns) == 1 and q.projection == ("o", "p", "s")


@pytest.mark.parametrize("keyword,text", [
    ("FILTER", "SELECT * WHERE { ?s ?p ?o FILTER(?o) }"),
    ("OPTIONAL", "SELECT * WHERE { ?s ?p ?o . OPTIONAL { ?s ?p ?x } }"),
    ("UNION", "SELECT * WHERE { { ?s ?p ?o } UNION { ?o ?p ?s } }"),
    ("LIMIT", "SELECT * WHERE { ?s ?p ?o } LIMIT 3"),
])
def test_unsupported_features_are_named(keyword, text):
    with pytest.raises(UnsupportedFeatureError) as info:
        parse_query(text)
    assert info.value.keyword == keyword


@pytest.mark.parametrize("text", [
    "SELECT * WHERE { ?s zz:p ?o . }",
    "SELECT ?x WHERE { ?s ?p ?o }",
    "SELECT * WHERE { ?s ?p }",
    "SELECT * { ?s ?p ?o",
    "SELECT * WHERE { \"lit\" ?p ?o }",
])
def test_syntax_errors_have_positions(text):
    with pytest.raises(QuerySyntaxError) as info:
        parse_query(text)
    assert info.value.line >= 1 and info.value.column >= 1


def test_semicolon_comma_and_blank_nodes():
    q = parse_query(f"PREFIX : <{EX}> SELECT ?x WHERE {{ ?x :p :a , :b ; :q _:n . _:n :r ?x }}")
    assert len(q.patterns) == 4
    assert isinstance(q.patterns[2].object, Var)
    assert q.projection == ("x",)


def _materialized(path, ontology, schema, rules):
    g, _ = data_with_ontology(path, ontology)
    return g, merged_graph(g, materialize(g, schema, rules)).freeze()


def test_shortcut_and_complex_on_single_service(ontology, schema, rules):
    asserted, materialized = _materialized(FIXTURES / "equivalence" / "single-service.ttl", ontology, schema, rules)
    row = {"service": Iri(EX + "svc1"), "contactPoint": Iri(EX + "personA")}
    shortcut = evaluate(parse_query(SHORTCUT), materialized, schema, "rdfs")
    complex_ = evaluate(parse_query(COMPLEX), asserted, schema, "rdfs")
    assert [dict(r) for r in shortcut] == [row]
    assert [dict(r) for r in complex_] == [row]


@pytest.mark.parametrize("path", EQUIVALENCE, ids=lambda p: p.stem)
def test_equivalence_corpus(path, ontology, schema, rules):
    asserted, materialized = _materialized(path, ontology, schema, rules)
    for entailment in ("rdfs", "none"):
        lhs = evaluate(parse_query(COMPLEX), asserted, schema, entailment).as_set()
        rhs = evaluate(parse_query(SHORTCUT), materialized, schema, entailment).as_set()
        assert lhs == rhs


def test_unrealized_role_yields_nothing(ontology, schema, rules):
    asserted, materialized = _materialized(FIXTURES / "equivalence" / "unrealized-role.ttl", ontology, schema, rules)
    assert len(evaluate(parse_query(COMPLEX), asserted, schema, "rdfs")) == 0
    assert len(evaluate(parse_query(SHORTCUT), materialized, schema, "rdfs")) == 0


def test_is_about_entailment(schema):
    g = Graph([Triple(Iri(EX + "ds1"), NFDICORE.license, Iri(EX + "cc0"))]).freeze()
    q = parse_query(f"PREFIX iao: <{IAO}> SELECT ?x ?y WHERE {{ ?x iao:isAbout ?y }}")
    assert [dict(r) for r in evaluate(q, g, schema, "rdfs")] == [{"x": Iri(EX + "ds1"), "y": Iri(EX + "cc0")}]
    assert len(evaluate(q, g, schema, "none")) == 0


def test_solution_output_formats(schema):
    g = Graph([Triple(Iri(EX + "a"), Iri(EX + "p"), Literal("x", language="en"))]).freeze()
    sol = evaluate(parse_query(f"PREFIX : <{EX}> SELECT ?s ?o WHERE {{ ?s :p ?o }}"), g, schema)
    assert sol.to_tsv(PrefixMap({"": EX})) == '?s\t?o\n:a\t"x"@en\n'
    assert sol.to_json() == {"head": ["s", "o"], "rows": [{"s": f"<{EX}a>", "o": '"x"@en'}]}


def test_solutions_are_deduplicated_and_sorted(schema):
    g = Graph([Triple(Iri(EX + n), Iri(EX + "p"), Iri(EX + m)) for n in "ba" for m in "yx"]).freeze()
    sol = evaluate(parse_query(f"PREFIX : <{EX}> SELECT ?s WHERE {{ ?s :p ?o }}"), g, schema)
    assert [r["s"] for r in sol] == [Iri(EX + "a"), Iri(EX + "b")]


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_matches_brute_force_and_is_monotone(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 200).freeze()
    s = extract_schema(g)
    q = random_query(rng)
    none = evaluate(q, g, s, "none").as_set()
    rdfs = evaluate(q, g, s, "rdfs").as_set()
    assert none == brute_force_query(q, g.triples(), False)
    assert rdfs == brute_force_query(q, g.triples(), True)
    assert none <= rdfs


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_join_order_independence(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 120).freeze()
    s = extract_schema(g)
    q = random_query(rng)
    for entailment in ("none", "rdfs"):
        expected = evaluate(q, g, s, entailment)
        for _ in range(3):
            assert evaluate(shuffled_query(q, rng), g, s, entailment) == expected


def test_complex_query_shuffled(ontology, schema):
    asserted, _ = data_with_ontology(FIXTURES / "equivalence" / "two-roles.ttl", ontology)
    q = parse_query(COMPLEX)
    expected = evaluate(q, asserted, schema, "rdfs")
    rng = random.Random(7)
    for _ in range(20):
        assert evaluate(shuffled_query(q, rng), asserted, schema, "rdfs") == expected
