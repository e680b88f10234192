from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, ROOT
from oracles import random_rich_graph
from nfdi_forge.errors import ParseError
from nfdi_forge.graph import Graph, isomorphic
from nfdi_forge.terms import BlankNode, Iri, Literal, Triple
from nfdi_forge.turtle import parse, parse_file, serialize
from nfdi_forge.vocab import NFDICORE, RDF_TYPE, XSD

EX = "https://example.org/nfdi/"
HEAD = f"@prefix nfdicore: <{NFDICORE}> .\n@prefix : <{EX}> .\n"


def bundled_rdf_files():
    return sorted(p for p in FIXTURES.rglob("*") if p.suffix in (".ttl", ".nt") and "negative" not in p.parts)


def test_empty_document():
    g, pm = parse("")
    assert len(g) == 0 and len(pm) == 0


def test_sparql_endpoint_statement():
    g, _ = parse(HEAD + ":d a nfdicore:Dataset ; nfdicore:sparqlEndpoint :ep .")
    assert len(g) == 2
    assert Triple(Iri(EX + "d"), NFDICORE.sparqlEndpoint, Iri(EX + "ep")) in g


def test_publisher_pattern_has_eight_triples():
    g, pm = parse_file(FIXTURES / "publisher-pattern.ttl")
    assert len(g) == 8
    assert pm.get("nfdicore") == str(NFDICORE)


def test_object_lists_anon_nodes_and_escapes():
    text = HEAD + """
:x a nfdicore:Person , nfdicore:Agent ;
   :knows [ :name "B\\u00e9a \\"B\\"" ] ;
   :note '''two
lines''' ;
   :n "3"^^<http://www.w3.org/2001/XMLSchema#integer> .
_:q :p :x .
"""
    g, _ = parse(text)
    assert g.count(Iri(EX + "x"), RDF_TYPE) == 2
    names = {t.object for t in g.triples(None, Iri(EX + "name"), None)}
    assert names == {Literal('Béa "B"')}
    assert Literal("two\nlines") in {t.object for t in g}
    assert Literal("3", XSD.integer) in {t.object for t in g}
    assert len(g.blank_nodes()) == 2


def test_bom_is_skipped():
    g, _ = parse("\ufeff" + HEAD + ":a :b :c .")
    assert len(g) == 1


def test_ntriples_dialect_rejects_prefixes():
    with pytest.raises(ParseError):
        parse(HEAD + ":a :b :c .", dialect="ntriples")


@pytest.mark.parametrize("name", sorted(json.loads((FIXTURES / "negative" / "expected.json").read_text())))
def test_negative_corpus(name):
    expected = json.loads((FIXTURES / "negative" / "expected.json").read_text())[name]
    path = FIXTURES / "negative" / name
    with pytest.raises(ParseError) as info:
        parse_file(path)
    err = info.value
    assert (err.kind, err.line, err.column) == (expected["kind"], expected["line"], expected["column"])
    lines = path.read_text(encoding="utf-8").split("\n")
    assert 1 <= err.line <= len(lines)
    assert 1 <= err.column <= len(lines[err.line - 1]) + 1


def test_serialize_empty():
    g = Graph()
    g.prefixes.bind("ex", EX)
    assert serialize(g) == f"@prefix ex: <{EX}> .\n"
    assert serialize(g, dialect="ntriples") == ""


def test_language_literal_round_trip():
    g = Graph([Triple(Iri(EX + "perf1"), Iri("http://schema.org/name"), Literal("Was Ihr Wollt", language="de"))])
    text = serialize(g)
    assert '"Was Ihr Wollt"@de' in text
    again, _ = parse(text)
    assert set(again) == set(g)


def test_serializer_is_deterministic():
    g, pm = parse_file(FIXTURES / "cq" / "suite-data.ttl")
    shuffled = list(g)
    random.Random(4).shuffle(shuffled)
    assert serialize(Graph(shuffled), pm) == serialize(g, pm)


@pytest.mark.parametrize("path", bundled_rdf_files(), ids=lambda p: str(p.relative_to(ROOT)))
def test_bundled_round_trip(path):
    g, pm = parse_file(path)
    for dialect in ("turtle", "ntriples"):
        again, _ = parse(serialize(g, pm, dialect), dialect=dialect)
        assert isomorphic(g, again)


def test_ntriples_and_turtle_outputs_agree():
    g, pm = parse_file(FIXTURES / "modules" / "nfdicore-excerpt.ttl")
    via_ttl, _ = parse(serialize(g, pm))
    via_nt, _ = parse(serialize(g, pm, "ntriples"), dialect="ntriples")
    assert isomorphic(via_ttl, via_nt)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_random_graph_round_trip(seed):
    g = random_rich_graph(random.Random(seed))
    for dialect in ("turtle", "ntriples"):
        again, _ = parse(serialize(g, dialect=dialect), dialect=dialect)
        assert isomorphic(g, again)


def test_blank_labels_preserved_on_parse():
    g, _ = parse(HEAD + "_:keep :p :o .")
    assert BlankNode("keep") in g.blank_nodes()
