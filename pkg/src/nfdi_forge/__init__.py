"""Toolkit for role/process ontologies: RDF store, Turtle I/O, schema
extraction, shortcut rules, validation, BGP queries and CQ suites."""

from .errors import (
    ForgeError,
    ImportCycleError,
    ModuleError,
    ParseError,
    PrefixConflictError,
    QuerySyntaxError,
    RuleSafetyError,
    RuleSyntaxError,
    SchemaError,
    StructuralError,
    SuiteError,
    UnresolvedImportError,
    UnsupportedFeatureError,
)
from .terms import BlankNode, Iri, Literal, Triple
from .graph import Graph, PrefixMap, isomorphic, match_pattern
from .turtle import parse, parse_file, serialize
from .ontology import (
    Schema,
    apply_intersection_axioms,
    extract_schema,
    load_manifest,
    load_registry,
    resolve_modules,
    subclass_closure,
)
from .rules import materialize, materialize_naive, parse_rules, parse_rules_file
from .validator import ValidationReport, Violation, validate
from .query import Query, SolutionSet, evaluate, parse_query
from .cq import CqCase, CqReport, load_suite, run_suite

__version__ = "0.1.0"

__all__ = [
    "BlankNode", "Iri", "Literal", "Triple", "Graph", "PrefixMap", "isomorphic", "match_pattern",
    "parse", "parse_file", "serialize",
    "Schema", "extract_schema", "subclass_closure", "apply_intersection_axioms",
    "load_manifest", "load_registry", "resolve_modules",
    "materialize", "materialize_naive", "parse_rules", "parse_rules_file",
    "Violation", "ValidationReport", "validate",
    "Query", "SolutionSet", "parse_query", "evaluate",
    "CqCase", "CqReport", "load_suite", "run_suite",
    "ForgeError", "ParseError", "StructuralError", "SchemaError", "ModuleError",
    "UnresolvedImportError", "ImportCycleError", "PrefixConflictError",
    "RuleSyntaxError", "RuleSafetyError", "QuerySyntaxError", "UnsupportedFeatureError", "SuiteError",
]
