"""Role, process and domain/range checks over instance graphs.

Typing is open world: a node with no rdf:type is never treated as being of
the wrong type. It only produces the softer ``ROLE_BEARER_UNTYPED`` warning
when it bears a role.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .graph import Graph, PrefixMap
from .ontology import Schema, _is_datatype
from .terms import Iri, Literal, Term, term_key
from .vocab import (
    BFO_CONTINUANT,
    BFO_OCCURRENT,
    HAS_ROLE,
    NFDI_RESOURCE,
    RDF_TYPE,
    RDFS_LITERAL,
    REALIZED_IN,
)

SEVERITY = {
    "CONTINUANT_OCCURRENT_OVERLAP": "error",
    "DOMAIN_VIOLATION": "error",
    "PROCESS_AS_RESOURCE_NOTICE": "notice",
    "RANGE_VIOLATION": "error",
    "ROLE_BEARER_NOT_IC": "error",
    "ROLE_BEARER_UNTYPED": "warning",
    "ROLE_NOT_REALIZED": "error",
    "ROLE_WITHOUT_BEARER": "warning",
}
SEVERITIES = ("error", "warning", "notice")


@dataclass(frozen=True)
class Violation:
    code: str
    focus: Term
    detail: str

    @property
    def severity(self) -> str:
        return SEVERITY[self.code]

    def sort_key(self):
        return (self.code, term_key(self.focus), self.detail)

    def to_dict(self, pm: PrefixMap | None = None) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "focus": _show(self.focus, pm),
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    graph_size: int = 0

    @property
    def counts(self) -> dict[str, int]:
        c = Counter(v.severity for v in self.violations)
        return {sev: c.get(sev, 0) for sev in SEVERITIES}

    @property
    def conforms(self) -> bool:
        return self.counts["error"] == 0

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def to_dict(self, pm: PrefixMap | None = None) -> dict:
        return {
            "conforms": self.conforms,
            "graphSize": self.graph_size,
            "counts": self.counts,
            "violations": [v.to_dict(pm) for v in self.violations],
        }

    def to_json(self, pm: PrefixMap | None = None) -> str:
        return json.dumps(self.to_dict(pm), indent=2, ensure_ascii=False)

    def to_table(self, pm: PrefixMap | None = None) -> str:
        counts = self.counts
        lines = [
            f"{counts['error']} error(s), {counts['warning']} warning(s), "
            f"{counts['notice']} notice(s) in {self.graph_size} triples"
        ]
        if self.violations:
            rows = [(v.severity, v.code, _show(v.focus, pm), v.detail) for v in self.violations]
            widths = [max(len(r[i]) for r in rows) for i in range(3)]
            for r in rows:
                lines.append("  ".join(r[i].ljust(widths[i]) for i in range(3)) + "  " + r[3])
        return "\n".join(lines) + "\n"


def _show(term: Term, pm: PrefixMap | None) -> str:
    if pm is not None and isinstance(term, Iri):
        c = pm.compact(term)
        if c:
            return c
    return term.nt()


class _Typing:
    def __init__(self, g: Graph, s: Schema):
        self.g, self.s = g, s
        self._cache: dict = {}

    def asserted(self, node: Term) -> set[Iri]:
        return {t for t in self.g.objects(node, RDF_TYPE) if isinstance(t, Iri)}

    def closure(self, node: Term) -> frozenset[Iri]:
        if node not in self._cache:
            self._cache[node] = self.s.type_closure(self.asserted(node))
        return self._cache[node]

    def is_a(self, node: Term, classes: frozenset[Iri]) -> bool:
        return bool(self.closure(node) & classes)


def _name(iri: Iri, pm: PrefixMap | None) -> str:
    return _show(iri, pm)


def validate(g: Graph, s: Schema, pm: PrefixMap | None = None) -> ValidationReport:
    """Run every check and return the violations in (code, focus) order."""
    pm = pm if pm is not None else g.prefixes
    typing = _Typing(g, s)
    found: set[Violation] = set()
    role_classes = s.role_classes

    def role_individual(node) -> bool:
        return typing.is_a(node, role_classes)

    # C1 bearers of roles must be independent continuants
    for bearer, _, role in g.triples(None, HAS_ROLE, None):
        if not role_individual(role):
            continue
        if not typing.asserted(bearer):
            found.add(Violation("ROLE_BEARER_UNTYPED", bearer,
                                f"bears role {_name(role, pm)} but has no rdf:type"))
        elif not typing.is_a(bearer, s.independent_continuant_classes):
            found.add(Violation("ROLE_BEARER_NOT_IC", bearer,
                                f"bears role {_name(role, pm)} but is not an independent continuant"))

    # C2 roles are realized in processes
    occurrents = s.process_classes | s.occurrent_classes
    for role, _, target in g.triples(None, REALIZED_IN, None):
        if not role_individual(role) or isinstance(target, Literal):
            continue
        if typing.asserted(target) and not typing.is_a(target, occurrents):
            found.add(Violation("ROLE_NOT_REALIZED", role,
                                f"realized in {_name(target, pm)}, which is not a process"))

    # C3 every role has a bearer
    for cls in role_classes:
        for role in g.subjects(RDF_TYPE, cls):
            if not g.subjects(HAS_ROLE, role):
                found.add(Violation("ROLE_WITHOUT_BEARER", role, "no bearer links to this role via has role"))

    individuals = {t.subject for t in g.triples(None, RDF_TYPE, None)}

    # C6 processes treated as resources (left open, so informational only)
    process_resources = set()
    resource_classes = s.descendants(NFDI_RESOURCE)
    for node in individuals:
        if typing.is_a(node, s.process_classes) and typing.is_a(node, resource_classes):
            process_resources.add(node)
            found.add(Violation("PROCESS_AS_RESOURCE_NOTICE", node, "typed both as a process and as a resource"))

    # C4 disjoint upper-level branches
    pairs = set(s.disjoint_pairs)
    if BFO_CONTINUANT in s.classes and BFO_OCCURRENT in s.classes:
        pairs.add(frozenset((BFO_CONTINUANT, BFO_OCCURRENT)))
    for node in individuals:
        if node in process_resources:
            continue
        closure = typing.closure(node)
        for pair in sorted(pairs, key=lambda p: sorted(term_key(c) for c in p)):
            a, b = sorted(pair, key=term_key)
            if a in closure and b in closure:
                found.add(Violation("CONTINUANT_OCCURRENT_OVERLAP", node,
                                    f"instance of both {_name(a, pm)} and {_name(b, pm)}"))

    # C5 declared domains and ranges, inherited along subproperties
    for prop in {t.predicate for t in g.triples()}:
        domains, ranges = set(), set()
        for sup in s.superproperties(prop):
            domains |= s.domain_of.get(sup, frozenset())
            ranges |= s.range_of.get(sup, frozenset())
        if not domains and not ranges:
            continue
        for subj, _, obj in g.triples(None, prop, None):
            for d in sorted(domains, key=term_key):
                if typing.asserted(subj) and d not in typing.closure(subj):
                    found.add(Violation("DOMAIN_VIOLATION", subj,
                                        f"subject of {_name(prop, pm)} but not a {_name(d, pm)}"))
            for r in sorted(ranges, key=term_key):
                problem = _range_problem(obj, r, typing)
                if problem:
                    found.add(Violation("RANGE_VIOLATION", obj,
                                        f"object of {_name(prop, pm)} {problem} {_name(r, pm)}"))

    return ValidationReport(sorted(found, key=Violation.sort_key), len(g))


def _range_problem(obj: Term, rng: Iri, typing: _Typing) -> str | None:
    if _is_datatype(rng):
        if not isinstance(obj, Literal):
            return "is not a literal of type"
        if rng != RDFS_LITERAL and obj.datatype != rng:
            return "has the wrong datatype, expected"
        return None
    if isinstance(obj, Literal):
        return "is a literal, expected an instance of"
    if typing.asserted(obj) and rng not in typing.closure(obj):
        return "is not a"
    return None


__all__ = ["Violation", "ValidationReport", "validate", "SEVERITY"]
