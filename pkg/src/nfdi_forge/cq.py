"""Competency-question suites: loading, running and reporting.

A suite is a JSON list of cases (see docs/cq-format.md). Cases either run a
query against the materialized graph and check an expectation, compare two
queries across materialization (equivalence mode), or record a question the
ontology cannot answer yet (unanswerable mode).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ForgeError, ParseError, SuiteError
from .graph import Graph, PrefixMap
from .ontology import Schema
from .query import SolutionSet, evaluate, parse_query
from .rules import Rule, materialize, merged_graph
from .turtle import parse_term

CATEGORIES = ("services", "standards", "processes", "events", "contact-points", "other")
MODES = ("query", "equivalence", "unanswerable")
OUTCOMES = ("pass", "fail", "skipped-unanswerable")
_EXPECTATION_KEYS = ("minRows", "exactRows", "rows")
_KNOWN_KEYS = {
    "id", "category", "question", "mode", "query", "altQuery", "expectation",
    "correspondence", "entailment", "rationale", "reconstructed",
}


@dataclass(frozen=True)
class CqCase:
    id: str
    category: str
    question: str
    mode: str
    query: str | None = None
    alt_query: str | None = None
    expectation: dict = field(default_factory=dict)
    correspondence: dict = field(default_factory=dict)
    entailment: str = "rdfs"
    rationale: str = ""
    reconstructed: bool = False


@dataclass(frozen=True)
class CqOutcome:
    case_id: str
    category: str
    mode: str
    status: str
    rows: int | None = None
    alt_rows: int | None = None
    diagnostics: str = ""

    def to_dict(self) -> dict:
        out = {"id": self.case_id, "category": self.category, "mode": self.mode, "status": self.status}
        if self.rows is not None:
            out["rows"] = self.rows
        if self.alt_rows is not None:
            out["altRows"] = self.alt_rows
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        return out


@dataclass
class CqReport:
    outcomes: list[CqOutcome]
    derived_count: int = 0

    @property
    def summary(self) -> dict[str, int]:
        c = Counter(o.status for o in self.outcomes)
        return {k: c.get(k, 0) for k in OUTCOMES}

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0

    def outcome(self, case_id: str) -> CqOutcome:
        for o in self.outcomes:
            if o.case_id == case_id:
                return o
        raise KeyError(case_id)

    def to_dict(self) -> dict:
        return {
            "summary": self.summary,
            "derivedTriples": self.derived_count,
            "cases": [o.to_dict() for o in self.outcomes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, sort_keys=False) + "\n"

    def to_table(self) -> str:
        s = self.summary
        lines = [f"{s['pass']} passed, {s['fail']} failed, {s['skipped-unanswerable']} unanswerable"]
        if self.outcomes:
            w_id = max(len(o.case_id) for o in self.outcomes)
            w_cat = max(len(o.category) for o in self.outcomes)
            for o in self.outcomes:
                line = f"{o.status:<20}  {o.case_id:<{w_id}}  {o.category:<{w_cat}}"
                if o.diagnostics:
                    line += "  " + o.diagnostics
                lines.append(line.rstrip())
        return "\n".join(lines) + "\n"


# -- loading ---------------------------------------------------------------------


def _case_from_dict(raw, index: int) -> CqCase:
    if not isinstance(raw, dict):
        raise SuiteError(f"entry {index} is not an object", None)
    case_id = raw.get("id")
    if not isinstance(case_id, str) or not case_id:
        raise SuiteError(f"entry {index} lacks a string 'id'", None)

    def bad(msg: str):
        return SuiteError(msg, case_id)

    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        raise bad(f"unknown field(s) {', '.join(unknown)}")
    category, mode = raw.get("category"), raw.get("mode")
    if category not in CATEGORIES:
        raise bad(f"category must be one of {', '.join(CATEGORIES)}")
    if mode not in MODES:
        raise bad(f"mode must be one of {', '.join(MODES)}")
    question = raw.get("question")
    if not isinstance(question, str) or not question.strip():
        raise bad("question text is required")
    query, alt = raw.get("query"), raw.get("altQuery")
    for name, value in (("query", query), ("altQuery", alt)):
        if value is not None and not isinstance(value, str):
            raise bad(f"{name} must be a string")

    expectation = raw.get("expectation", {})
    correspondence = raw.get("correspondence", {})
    if mode == "query":
        if not query:
            raise bad("mode 'query' needs a query")
        if alt:
            raise bad("mode 'query' takes no altQuery")
        if not isinstance(expectation, dict) or len(set(expectation) & set(_EXPECTATION_KEYS)) != 1 \
                or set(expectation) - set(_EXPECTATION_KEYS):
            raise bad("expectation must hold exactly one of minRows, exactRows, rows")
        key = next(iter(expectation))
        value = expectation[key]
        if key in ("minRows", "exactRows") and (not isinstance(value, int) or isinstance(value, bool) or value < 0):
            raise bad(f"{key} must be a non-negative integer")
        if key == "rows" and not (isinstance(value, list) and all(isinstance(r, dict) for r in value)):
            raise bad("rows must be a list of objects")
    elif mode == "equivalence":
        if not query or not alt:
            raise bad("mode 'equivalence' needs both query and altQuery")
        if not isinstance(correspondence, dict) or not correspondence \
                or not all(isinstance(k, str) and isinstance(v, str) for k, v in correspondence.items()):
            raise bad("mode 'equivalence' needs a non-empty correspondence of variable names")
        if len(set(correspondence.values())) != len(correspondence):
            raise bad("correspondence must be one-to-one")
    else:
        if not raw.get("rationale"):
            raise bad("mode 'unanswerable' needs a rationale")

    entailment = raw.get("entailment", "rdfs")
    if entailment not in ("rdfs", "none"):
        raise bad("entailment must be 'rdfs' or 'none'")
    reconstructed = raw.get("reconstructed", False)
    if not isinstance(reconstructed, bool):
        raise bad("reconstructed must be true or false")
    return CqCase(
        id=case_id,
        category=category,
        question=question,
        mode=mode,
        query=query,
        alt_query=alt,
        expectation=dict(expectation) if mode == "query" else {},
        correspondence={k.lstrip("?"): v.lstrip("?") for k, v in correspondence.items()},
        entailment=entailment,
        rationale=raw.get("rationale", ""),
        reconstructed=reconstructed,
    )


def load_suite(text: str) -> list[CqCase]:
    """Parse and check a suite document. Raises SuiteError naming the offending case."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SuiteError(f"malformed suite document: {exc}", None) from None
    if not isinstance(data, list):
        raise SuiteError("suite document must be a JSON list of cases", None)
    cases, seen = [], set()
    for i, raw in enumerate(data):
        case = _case_from_dict(raw, i)
        if case.id in seen:
            raise SuiteError("duplicate case id", case.id)
        seen.add(case.id)
        cases.append(case)
    return cases


def load_suite_file(path) -> list[CqCase]:
    with open(path, encoding="utf-8-sig") as fh:
        return load_suite(fh.read())


# -- running ---------------------------------------------------------------------


def _expected_rows(rows: list[dict], prefixes: PrefixMap) -> set[frozenset]:
    out = set()
    for r in rows:
        out.add(frozenset((k.lstrip("?"), parse_term(v, prefixes)) for k, v in r.items()))
    return out


def _check_expectation(case: CqCase, sol: SolutionSet, prefixes: PrefixMap) -> str:
    exp = case.expectation
    if "minRows" in exp:
        return "" if len(sol) >= exp["minRows"] else f"expected at least {exp['minRows']} rows, got {len(sol)}"
    if "exactRows" in exp:
        return "" if len(sol) == exp["exactRows"] else f"expected {exp['exactRows']} rows, got {len(sol)}"
    want = _expected_rows(exp["rows"], prefixes)
    got = sol.as_set()
    if want == got:
        return ""
    return f"row mismatch: {len(got - want)} unexpected, {len(want - got)} missing"


def _run_case(case: CqCase, asserted: Graph, materialized: Graph, s: Schema, prefixes: PrefixMap) -> CqOutcome:
    def outcome(status, rows=None, alt_rows=None, diag=""):
        return CqOutcome(case.id, case.category, case.mode, status, rows, alt_rows, diag)

    if case.mode == "unanswerable":
        return outcome("skipped-unanswerable", diag=case.rationale)
    try:
        q = parse_query(case.query, prefixes)
        if case.mode == "query":
            sol = evaluate(q, materialized, s, case.entailment)
            problem = _check_expectation(case, sol, q.prefixes)
            return outcome("fail" if problem else "pass", len(sol), diag=problem)
        alt = parse_query(case.alt_query, prefixes)
        if set(case.correspondence) != set(q.projection) or set(case.correspondence.values()) != set(alt.projection):
            return outcome("fail", diag="correspondence does not cover both projections")
        before = evaluate(q, asserted, s, case.entailment).renamed(case.correspondence)
        after = evaluate(alt, materialized, s, case.entailment)
        if before.as_set() == after.as_set():
            return outcome("pass", len(before), len(after))
        # the shortcut form may have been listed first; accept the mirrored orientation
        alt_before = evaluate(alt, asserted, s, case.entailment)
        q_after = evaluate(q, materialized, s, case.entailment).renamed(case.correspondence)
        if alt_before.as_set() == q_after.as_set():
            return outcome("pass", len(q_after), len(alt_before), "matched with altQuery on the asserted graph")
        return outcome("fail", len(before), len(after), "solution sets differ")
    except (ForgeError, ParseError, ValueError) as exc:
        return outcome("fail", diag=f"{type(exc).__name__}: {exc}")


def run_suite(
    suite: Sequence[CqCase],
    g: Graph,
    s: Schema,
    rules: Iterable[Rule],
    shared_materialization: bool = True,
) -> CqReport:
    """Run every case. Materialization happens once unless ``shared_materialization`` is off."""
    rules = list(rules)
    prefixes = g.prefixes
    asserted = g.copy().freeze()

    def materialized_graph():
        derived = materialize(asserted, s, rules)
        return merged_graph(asserted, derived).freeze(), len(derived)

    shared, count = materialized_graph() if shared_materialization else (None, 0)
    outcomes = []
    for case in suite:
        target = shared
        if target is None:
            target, count = materialized_graph()
        outcomes.append(_run_case(case, asserted, target, s, prefixes))
    outcomes.sort(key=lambda o: o.case_id)
    return CqReport(outcomes, count)


__all__ = ["CqCase", "CqOutcome", "CqReport", "load_suite", "load_suite_file", "run_suite", "CATEGORIES"]
