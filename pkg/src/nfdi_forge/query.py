"""SELECT queries over basic graph patterns.

The accepted language is PREFIX/BASE declarations, ``SELECT [DISTINCT]
vars|*``, and one ``WHERE { ... }`` block of triple patterns using ``;``,
``,``, ``a`` and ``.``. Anything else is rejected with an explicit error.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from .errors import ParseError, QuerySyntaxError, UnsupportedFeatureError
from .graph import Graph, PrefixMap
from .ontology import Schema
from .terms import BlankNode, Iri, Literal, Term, term_key
from .turtle import _Reader
from .vocab import RDF_TYPE

ENTAILMENTS = ("none", "rdfs")

_UNSUPPORTED = {
    "OPTIONAL", "FILTER", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES",
    "ORDER", "LIMIT", "OFFSET", "GROUP", "HAVING", "FROM", "NAMED",
    "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "EXISTS", "NOT",
}
_WORD = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_VAR = re.compile(r"[?$]([A-Za-z0-9_]+)")


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


Slot = Union[Var, Iri, Literal, BlankNode]


@dataclass(frozen=True)
class TriplePattern:
    subject: Slot
    predicate: Slot
    object: Slot

    def variables(self) -> list[str]:
        return [x.name for x in (self.subject, self.predicate, self.object) if isinstance(x, Var)]


@dataclass(frozen=True)
class Query:
    prefixes: PrefixMap
    select_vars: tuple[str, ...] | None
    patterns: tuple[TriplePattern, ...]

    @property
    def star(self) -> bool:
        return self.select_vars is None

    def variables(self) -> list[str]:
        """Named (projectable) variables in order of first appearance."""
        seen: dict[str, None] = {}
        for p in self.patterns:
            for v in p.variables():
                if not v.startswith("_:"):
                    seen.setdefault(v, None)
        return list(seen)

    @property
    def projection(self) -> tuple[str, ...]:
        if self.select_vars is None:
            return tuple(sorted(self.variables()))
        return self.select_vars


class _QueryReader(_Reader):
    def __init__(self, text: str, prefixes: PrefixMap | None):
        super().__init__(text, "", "turtle")
        if prefixes is not None:
            self.prefixes = prefixes.copy()

    def qfail(self, message: str, pos: int | None = None):
        line, col = self.where(pos)
        raise QuerySyntaxError(message, line, col)

    def word(self) -> str | None:
        self.skip_ws()
        m = _WORD.match(self.text, self.pos)
        if not m:
            return None
        after = self.text[m.end():m.end() + 1]
        if after == ":":
            return None  # prefixed name, not a keyword
        return m.group().upper()

    def take_word(self, expected: str) -> None:
        w = self.word()
        if w != expected:
            self.unsupported_or_fail(w, f"expected {expected}")
        self.pos += len(expected)

    def unsupported_or_fail(self, word: str | None, message: str):
        if word in _UNSUPPORTED:
            line, col = self.where()
            raise UnsupportedFeatureError(word, line, col)
        self.qfail(message)

    def parse_query(self) -> Query:
        while True:
            w = self.word()
            if w == "PREFIX":
                self.pos += len("prefix")
                try:
                    self._prefix_body(self.pos, sparql=True)
                except ParseError as exc:
                    raise QuerySyntaxError(exc.message, exc.line, exc.column) from None
            elif w == "BASE":
                self.pos += len("base")
                self.base = self.iri_ref().value
            else:
                break
        self.take_word("SELECT")
        if self.word() in ("DISTINCT", "REDUCED"):
            self.pos += len(self.word())
        select: list[str] | None = []
        if self.peek() == "*":
            self.pos += 1
            select = None
        else:
            while True:
                self.skip_ws()
                m = _VAR.match(self.text, self.pos)
                if not m:
                    break
                select.append(m.group(1))
                self.pos = m.end()
            if not select:
                w = self.word()
                self.unsupported_or_fail(w, "expected variables or '*' after SELECT")
        if self.word() == "WHERE":
            self.pos += len("where")
        if self.peek() != "{":
            self.unsupported_or_fail(self.word(), "expected '{'")
        self.pos += 1
        patterns: list[TriplePattern] = []
        self.triples_block(patterns)
        if self.peek() != "}":
            self.unsupported_or_fail(self.word(), "expected '}'")
        self.pos += 1
        if self.peek():
            self.unsupported_or_fail(self.word(), "unexpected input after query")
        query = Query(self.prefixes, tuple(select) if select is not None else None, tuple(patterns))
        if select is not None:
            known = set(query.variables())
            for name in select:
                if name not in known:
                    self.qfail(f"selected variable ?{name} does not occur in the pattern", 0)
            if len(set(select)) != len(select):
                self.qfail("duplicate variable in SELECT", 0)
        return query

    def triples_block(self, out: list[TriplePattern]) -> None:
        while True:
            ch = self.peek()
            if ch == "}" or ch == "":
                return
            if ch == "{":
                self._reject_group()
            w = self.word()
            if w in _UNSUPPORTED:
                line, col = self.where()
                raise UnsupportedFeatureError(w, line, col)
            subject = self.slot("subject")
            self.property_list(subject, out)
            if self.peek() == ".":
                self.pos += 1
                continue
            return

    def _reject_group(self) -> None:
        # `{ ... } UNION { ... }` and `{ ... } MINUS { ... }`: name the keyword if one follows
        depth, i = 0, self.pos
        while i < len(self.text):
            if self.text[i] == "{":
                depth += 1
            elif self.text[i] == "}":
                depth -= 1
                if depth == 0:
                    break
            i += 1
        m = re.compile(r"\s*([A-Za-z]+)").match(self.text, i + 1)
        if m and m.group(1).upper() in _UNSUPPORTED:
            line, col = self.where(m.start(1))
            raise UnsupportedFeatureError(m.group(1).upper(), line, col)
        self.qfail("nested group patterns are not supported")

    def property_list(self, subject: Slot, out: list[TriplePattern]) -> None:
        while True:
            if self.peek() == "a" and self.at_keyword("a"):
                self.pos += 1
                predicate: Slot = RDF_TYPE
            else:
                predicate = self.slot("predicate")
                if isinstance(predicate, (Literal, BlankNode)):
                    self.qfail("predicate must be an IRI or variable")
            if self.peek() in ("/", "|", "^", "*", "+"):
                line, col = self.where()
                raise UnsupportedFeatureError("property paths", line, col)
            while True:
                obj = self.slot("object")
                out.append(TriplePattern(subject, predicate, obj))
                if self.peek() != ",":
                    break
                self.pos += 1
            if self.peek() != ";":
                return
            while self.peek() == ";":
                self.pos += 1
            if self.peek() in (".", "}"):
                return

    def slot(self, position: str) -> Slot:
        self.skip_ws()
        start = self.pos
        m = _VAR.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Var(m.group(1))
        ch = self.text[self.pos:self.pos + 1]
        if ch in ("[", "("):
            self.qfail("anonymous blank nodes and collections are not supported")
        if ch == "" or ch in "}.;,":
            self.qfail(f"expected {position}")
        try:
            term = self.term(position)
        except ParseError as exc:
            if exc.kind == "unknown-prefix":
                raise QuerySyntaxError(exc.message, exc.line, exc.column) from None
            w = self.word() if self.pos == start else None
            if w in _UNSUPPORTED:
                line, col = self.where(start)
                raise UnsupportedFeatureError(w, line, col) from None
            raise QuerySyntaxError(exc.message, exc.line, exc.column) from None
        if isinstance(term, BlankNode):
            # blank nodes in patterns act as non-projectable variables
            return Var("_:" + term.label)
        if isinstance(term, Literal) and position == "subject":
            self.qfail("literal in subject position", start)
        return term


def parse_query(text: str, prefixes: PrefixMap | None = None) -> Query:
    """Parse query text; ``prefixes`` supplies bindings the text may omit."""
    return _QueryReader(text, prefixes).parse_query()


# -- evaluation --------------------------------------------------------------------


@dataclass(frozen=True)
class SolutionSet:
    header: tuple[str, ...]
    rows: tuple[Mapping[str, Term], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[Mapping[str, Term]]:
        return iter(self.rows)

    def as_set(self) -> set[frozenset]:
        return {frozenset(r.items()) for r in self.rows}

    def renamed(self, mapping: Mapping[str, str]) -> "SolutionSet":
        header = tuple(mapping.get(h, h) for h in self.header)
        rows = [{mapping.get(k, k): v for k, v in r.items()} for r in self.rows]
        return make_solution_set(header, rows)

    def to_tsv(self, pm: PrefixMap | None = None) -> str:
        def show(t: Term) -> str:
            if pm is not None and isinstance(t, Iri):
                c = pm.compact(t)
                if c:
                    return c
            return t.nt()

        lines = ["\t".join("?" + h for h in self.header)]
        lines += ["\t".join(show(r[h]) for h in self.header) for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "head": list(self.header),
            "rows": [{h: r[h].nt() for h in self.header} for r in self.rows],
        }


def make_solution_set(header: Iterable[str], rows: Iterable[Mapping[str, Term]]) -> SolutionSet:
    header = tuple(header)
    unique = {tuple(r[h] for h in header) for r in rows}
    ordered = sorted(unique, key=lambda vals: tuple(term_key(v) for v in vals))
    return SolutionSet(header, tuple(dict(zip(header, vals)) for vals in ordered))


def _plan(patterns: list[TriplePattern]) -> list[TriplePattern]:
    """Greedy most-bound-first order; ties keep textual order."""
    remaining = list(patterns)
    bound: set[str] = set()
    order = []
    while remaining:
        def score(item):
            idx, p = item
            n = sum(1 for x in (p.subject, p.predicate, p.object) if not isinstance(x, Var) or x.name in bound)
            return (n, -idx)

        idx, best = max(enumerate(remaining), key=score)
        order.append(best)
        bound.update(best.variables())
        remaining.pop(idx)
    return order


def _resolve(slot: Slot, binding: Mapping[str, Term]) -> Term | None:
    if isinstance(slot, Var):
        return binding.get(slot.name)
    return slot


def _extend(binding: dict, slot: Slot, value: Term) -> dict | None:
    if not isinstance(slot, Var):
        return binding if slot == value else None
    current = binding.get(slot.name)
    if current is None:
        out = dict(binding)
        out[slot.name] = value
        return out
    return binding if current == value else None


def _candidates(p: TriplePattern, binding: dict, g: Graph, s: Schema | None, rdfs: bool):
    sv, pv, ov = (_resolve(x, binding) for x in (p.subject, p.predicate, p.object))
    if isinstance(sv, Literal) or (pv is not None and not isinstance(pv, Iri)):
        return
    if rdfs and s is not None and isinstance(p.predicate, Iri):
        if p.predicate == RDF_TYPE and isinstance(p.object, Iri):
            for cls in s.subclasses(p.object):
                for t in g.triples(sv, RDF_TYPE, cls):
                    yield t.subject, RDF_TYPE, p.object
            return
        for prop in s.subproperties(p.predicate):
            for t in g.triples(sv, prop, ov):
                yield t.subject, p.predicate, t.object
        return
    for t in g.triples(sv, pv, ov):
        yield t


def _join(plan: list[TriplePattern], binding: dict, g, s, rdfs) -> Iterator[dict]:
    if not plan:
        yield binding
        return
    p, rest = plan[0], plan[1:]
    for subj, pred, obj in _candidates(p, binding, g, s, rdfs):
        b = _extend(binding, p.subject, subj)
        if b is None:
            continue
        b = _extend(b, p.predicate, pred)
        if b is None:
            continue
        b = _extend(b, p.object, obj)
        if b is None:
            continue
        yield from _join(rest, b, g, s, rdfs)


def evaluate(q: Query, g: Graph, s: Schema | None = None, entailment: str = "none") -> SolutionSet:
    """Evaluate ``q`` over ``g``; ``rdfs`` entailment expands constant classes and predicates."""
    if entailment not in ENTAILMENTS:
        raise ValueError(f"unknown entailment regime {entailment!r}")
    rdfs = entailment == "rdfs"
    header = q.projection
    rows = (
        {h: b[h] for h in header}
        for b in _join(_plan(list(q.patterns)), {}, g, s, rdfs)
    )
    return make_solution_set(header, rows)


def solutions_to_json(sol: SolutionSet) -> str:
    return json.dumps(sol.to_json(), indent=2, ensure_ascii=False)


__all__ = [
    "Var",
    "TriplePattern",
    "Query",
    "SolutionSet",
    "parse_query",
    "evaluate",
    "make_solution_set",
]
