"""Command-line entry point: ``nfdi-forge <subcommand> ...``.

Exit status is 0 on success, 1 when processing worked but checks failed
(validation errors, failing CQ cases), and 2 for input or usage problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .cq import load_suite_file, run_suite
from .errors import ForgeError, ParseError
from .graph import Graph, PrefixMap
from .ontology import (
    Schema,
    default_registry_dirs,
    extract_schema,
    load_manifest,
    load_registry,
    resolve_modules,
)
from .query import evaluate, parse_query
from .rules import inferred_graph, materialize, merged_graph, parse_rules_file
from .terms import term_key
from .turtle import parse_file, serialize
from .validator import validate
from .vocab import RDF_TYPE

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class _Context:
    """Ontology, data and schema for the subcommands taking MANIFEST DATA."""

    def __init__(self, manifest: str, data: str, dialect: str | None = None):
        root = load_manifest(manifest)
        registry = load_registry(default_registry_dirs(manifest))
        registry[root.module_id] = root
        self.ontology = resolve_modules(root, registry)
        self.data, data_pm = parse_file(data, dialect)
        self.prefixes = PrefixMap()
        for label, ns in self.ontology.prefixes.items():
            self.prefixes.bind(label, ns)
        for label, ns in data_pm.items():
            self.prefixes.bind(label, ns)
        self.data.prefixes = self.prefixes.copy()
        self.graph = Graph(self.ontology.triples(), self.prefixes.copy())
        self.graph.update(self.data.triples())
        self.graph.freeze()
        self.schema: Schema = extract_schema(self.graph)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_parse(args) -> int:
    g, _ = parse_file(args.file, args.dialect)
    if args.json:
        _write(json.dumps({"file": args.file, "triples": len(g)}) + "\n", None)
    else:
        _write(f"{len(g)} triples\n", None)
    return EXIT_OK


def _cmd_validate(args) -> int:
    ctx = _Context(args.manifest, args.data, args.dialect)
    graph = ctx.graph
    if args.post_materialize:
        if not args.rules:
            raise _UsageError("--post-materialize needs --rules")
        derived = materialize(graph, ctx.schema, parse_rules_file(args.rules, ctx.prefixes))
        graph = merged_graph(graph, derived).freeze()
    report = validate(graph, ctx.schema, ctx.prefixes)
    _write(report.to_json(ctx.prefixes) + "\n" if args.json else report.to_table(ctx.prefixes), None)
    return EXIT_OK if report.conforms else EXIT_FAILED


def _cmd_materialize(args) -> int:
    ctx = _Context(args.manifest, args.data, args.dialect)
    derived = materialize(ctx.graph, ctx.schema, parse_rules_file(args.rules, ctx.prefixes))
    if args.emit == "asserted":
        out = ctx.data
    elif args.emit == "inferred":
        out = inferred_graph(derived, ctx.prefixes)
    else:
        out = merged_graph(ctx.data, derived)
    _write(serialize(out, ctx.prefixes), args.output)
    if args.output:
        sys.stderr.write(f"{len(derived)} triples derived, {len(out)} written to {args.output}\n")
    return EXIT_OK


def _cmd_query(args) -> int:
    ctx = _Context(args.manifest, args.data, args.dialect)
    graph = ctx.graph
    if not args.no_materialize:
        if not args.rules:
            raise _UsageError("query needs --rules unless --no-materialize is given")
        derived = materialize(graph, ctx.schema, parse_rules_file(args.rules, ctx.prefixes))
        graph = merged_graph(graph, derived).freeze()
    with open(args.query, encoding="utf-8-sig") as fh:
        q = parse_query(fh.read(), ctx.prefixes)
    sol = evaluate(q, graph, ctx.schema, args.entailment)
    if args.json:
        _write(json.dumps(sol.to_json(), indent=2, ensure_ascii=False) + "\n", None)
    else:
        _write(sol.to_tsv(ctx.prefixes), None)
    return EXIT_OK


def _cmd_cq(args) -> int:
    ctx = _Context(args.manifest, args.data, args.dialect)
    suite = load_suite_file(args.suite)
    rules = parse_rules_file(args.rules, ctx.prefixes)
    report = run_suite(suite, ctx.graph, ctx.schema, rules)
    _write(report.to_json() if args.json else report.to_table(), None)
    return EXIT_OK if report.ok else EXIT_FAILED


def _cmd_stats(args) -> int:
    g, pm = parse_file(args.data, args.dialect)
    classes = Counter(t.object for t in g.triples(None, RDF_TYPE, None))
    props = Counter(t.predicate for t in g.triples())

    def ordered(counter):
        return sorted(counter.items(), key=lambda kv: (-kv[1], term_key(kv[0])))

    def show(term):
        return pm.compact(term) or term.nt()

    if args.json:
        doc = {
            "triples": len(g),
            "classes": {show(c): n for c, n in ordered(classes)},
            "properties": {show(p): n for p, n in ordered(props)},
        }
        _write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", None)
        return EXIT_OK
    lines = [f"{len(g)} triples, {len(classes)} classes used, {len(props)} properties used"]
    for title, counter in (("classes", classes), ("properties", props)):
        lines.append(f"{title}:")
        lines += [f"  {n:>6}  {show(t)}" for t, n in ordered(counter)]
    _write("\n".join(lines) + "\n", None)
    return EXIT_OK


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nfdi-forge", description="Role/process ontology toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_manifest=True):
        if with_manifest:
            sp.add_argument("manifest", help="module manifest (JSON)")
        sp.add_argument("--dialect", choices=("turtle", "ntriples"), help="data syntax; .nt files default to ntriples")
        sp.add_argument("--json", action="store_true", help="structured output")

    sp = sub.add_parser("parse", help="syntax-check a Turtle or N-Triples file")
    sp.add_argument("file")
    common(sp, with_manifest=False)
    sp.set_defaults(func=_cmd_parse)

    sp = sub.add_parser("validate", help="check role, process and domain/range constraints")
    common(sp)
    sp.add_argument("data")
    sp.add_argument("--post-materialize", action="store_true", help="validate after applying --rules")
    sp.add_argument("--rules")
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("materialize", help="apply shortcut rules and write Turtle")
    common(sp)
    sp.add_argument("data")
    sp.add_argument("--rules", required=True)
    sp.add_argument("--emit", choices=("asserted", "inferred", "merged"), default="merged")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_materialize)

    sp = sub.add_parser("query", help="evaluate a SELECT query")
    common(sp)
    sp.add_argument("data")
    sp.add_argument("--rules")
    sp.add_argument("-q", "--query", required=True)
    sp.add_argument("--entailment", choices=("rdfs", "none"), default="rdfs")
    sp.add_argument("--no-materialize", action="store_true")
    sp.set_defaults(func=_cmd_query)

    sp = sub.add_parser("cq", help="run a competency-question suite")
    common(sp)
    sp.add_argument("data")
    sp.add_argument("--rules", required=True)
    sp.add_argument("--suite", required=True)
    sp.set_defaults(func=_cmd_cq)

    sp = sub.add_parser("stats", help="class and property usage counts")
    sp.add_argument("data")
    common(sp, with_manifest=False)
    sp.set_defaults(func=_cmd_stats)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"nfdi-forge: {exc}\n")
        return EXIT_INPUT
    except ParseError as exc:
        sys.stderr.write(f"nfdi-forge: parse error: {exc}\n")
        return EXIT_INPUT
    except (ForgeError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"nfdi-forge: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "build_parser"]
