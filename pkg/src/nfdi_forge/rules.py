"""Shortcut rules: parsing and forward-chaining materialization.

A rule file holds ``@prefix`` lines followed by one rule per line::

    publisher: nfdicore:Agent(?a) ^ nfdicore:Resource(?r) ^ ... -> nfdicore:publisher(?r, ?a)

Class atoms match ``rdf:type`` triples under subclass closure and property
atoms match their property or any subproperty of it. Heads are always a
single property atom.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from .errors import ParseError, RuleSafetyError, RuleSyntaxError
from .graph import Graph, PrefixMap
from .ontology import Schema
from .terms import BlankNode, Iri, Literal, Term, Triple, term_key, triple_key
from .turtle import parse_term
from .vocab import RDF_TYPE


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self):
        return "?" + self.name


Arg = Union[Var, Iri, Literal, BlankNode]


@dataclass(frozen=True)
class ClassAtom:
    cls: Iri
    arg: Arg

    @property
    def args(self) -> tuple[Arg, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class PropertyAtom:
    prop: Iri
    subject: Arg
    object: Arg

    @property
    def args(self) -> tuple[Arg, ...]:
        return (self.subject, self.object)


RuleAtom = Union[ClassAtom, PropertyAtom]


@dataclass(frozen=True)
class Rule:
    id: str
    body: tuple[RuleAtom, ...]
    head: PropertyAtom

    def body_variables(self) -> set[str]:
        return {a.name for atom in self.body for a in atom.args if isinstance(a, Var)}

    def head_variables(self) -> set[str]:
        return {a.name for a in self.head.args if isinstance(a, Var)}


@dataclass(frozen=True)
class DerivedTriple:
    triple: Triple
    rule_id: str
    bindings: Mapping[str, Term]
    round: int


def check_rule_safety(rule: Rule) -> tuple[str, ...]:
    """Head variables missing from the body, sorted; empty means the rule is safe."""
    return tuple(sorted(rule.head_variables() - rule.body_variables()))


# -- parsing ---------------------------------------------------------------------

_PREFIX_LINE = re.compile(r"^\s*(?:@prefix|PREFIX)\s+([A-Za-z][A-Za-z0-9_\-.]*)?:\s*<([^>\s]*)>\s*\.?\s*(?:#.*)?$", re.I)
_RULE_HEAD = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_\-.]*)\s*:\s+(.*)$")
_ATOM = re.compile(r"\s*([^\s()^∧]+)\s*\(([^()]*)\)\s*")


def _strip_comment(line: str) -> str:
    depth_iri = False
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote and line[i - 1] != "\\":
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "<":
            depth_iri = True
        elif ch == ">":
            depth_iri = False
        elif ch == "#" and not depth_iri:
            return line[:i]
    return line


def _split_args(text: str) -> list[str]:
    args, buf, quote = [], [], None
    for ch in text:
        if quote:
            buf.append(ch)
            if ch == quote and (len(buf) < 2 or buf[-2] != "\\"):
                quote = None
        elif ch in "\"'":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            args.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
    args.append("".join(buf).strip())
    return [a for a in args] if any(args) else []


def _parse_atoms(text: str, lineno: int) -> list[tuple[str, list[str]]]:
    parts = re.split(r"\s*(?:\^|∧)\s*", text.strip())
    atoms = []
    for part in parts:
        m = _ATOM.fullmatch(part)
        if not m:
            raise RuleSyntaxError(f"malformed atom {part.strip()!r}", lineno)
        args = _split_args(m.group(2))
        if len(args) not in (1, 2) or any(not a for a in args):
            raise RuleSyntaxError(f"atom {m.group(1)} must have one or two arguments", lineno)
        atoms.append((m.group(1), args))
    return atoms


def _resolve_name(name: str, pm: PrefixMap, lineno: int) -> Iri:
    if name.startswith("<") and name.endswith(">"):
        return Iri(name[1:-1])
    if ":" not in name:
        name = ":" + name
    label, _, local = name.partition(":")
    ns = pm.get(label)
    if ns is None:
        raise RuleSyntaxError(f"unknown prefix {label!r}", lineno)
    return Iri(ns + re.sub(r"\\(.)", r"\1", local))


def _resolve_arg(text: str, pm: PrefixMap, lineno: int) -> Arg:
    if text.startswith("?"):
        try:
            return Var(text[1:])
        except ValueError as exc:
            raise RuleSyntaxError(str(exc), lineno) from None
    if text[0] not in "<\"'_" and ":" not in text:
        text = ":" + text
    try:
        return parse_term(text, pm)
    except ParseError as exc:
        raise RuleSyntaxError(exc.message, lineno) from None


def parse_rules(text: str, pm: PrefixMap | None = None) -> list[Rule]:
    """Parse a rule document; rules come back in file order and are all safe."""
    pm = pm.copy() if pm is not None else PrefixMap()
    rules: list[Rule] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.lstrip("\ufeff").splitlines(), start=1):
        m = _PREFIX_LINE.match(raw)
        if m:
            pm.bind(m.group(1) or "", m.group(2))
            continue
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _RULE_HEAD.match(line)
        if not m:
            raise RuleSyntaxError("expected 'id: body -> head'", lineno)
        rule_id, rest = m.groups()
        if rule_id in seen:
            raise RuleSyntaxError(f"duplicate rule id {rule_id!r}", lineno)
        arrow = re.split(r"\s*(?:->|→)\s*", rest)
        if len(arrow) != 2 or not arrow[0].strip() or not arrow[1].strip():
            raise RuleSyntaxError("rule needs exactly one '->' with body and head", lineno)
        body_raw = _parse_atoms(arrow[0], lineno)
        head_raw = _parse_atoms(arrow[1], lineno)
        if len(head_raw) != 1:
            raise RuleSyntaxError("rule head must be a single atom", lineno)
        if len(head_raw[0][1]) != 2:
            raise RuleSyntaxError("rule heads must be property atoms", lineno)

        body_vars = {a[1:] for _, args in body_raw for a in args if a.startswith("?")}
        missing = sorted({a[1:] for a in head_raw[0][1] if a.startswith("?")} - body_vars)
        if missing:
            raise RuleSafetyError(rule_id, missing, lineno)

        body = tuple(_build_atom(name, args, pm, lineno) for name, args in body_raw)
        head = _build_atom(*head_raw[0], pm, lineno)
        rule = Rule(rule_id, body, head)
        seen.add(rule_id)
        rules.append(rule)
    return rules


def _build_atom(name: str, args: list[str], pm: PrefixMap, lineno: int) -> RuleAtom:
    iri = _resolve_name(name, pm, lineno)
    resolved = [_resolve_arg(a, pm, lineno) for a in args]
    if len(resolved) == 1:
        return ClassAtom(iri, resolved[0])
    return PropertyAtom(iri, resolved[0], resolved[1])


def parse_rules_file(path, pm: PrefixMap | None = None) -> list[Rule]:
    with open(path, encoding="utf-8-sig") as fh:
        return parse_rules(fh.read(), pm)


# -- semi-naive evaluation ---------------------------------------------------------


def _value(arg: Arg, binding: Mapping[str, Term]) -> Term | None:
    if isinstance(arg, Var):
        return binding.get(arg.name)
    return arg


def _bind(binding: dict, arg: Arg, term: Term) -> dict | None:
    if isinstance(arg, Var):
        current = binding.get(arg.name)
        if current is None:
            out = dict(binding)
            out[arg.name] = term
            return out
        return binding if current == term else None
    return binding if arg == term else None


def _match_atom(atom: RuleAtom, binding: dict, store: Graph, schema: Schema) -> Iterator[dict]:
    if isinstance(atom, ClassAtom):
        x = _value(atom.arg, binding)
        if x is not None:
            if isinstance(x, Literal):
                return
            for t in store.objects(x, RDF_TYPE):
                if isinstance(t, Iri) and atom.cls in schema.superclasses(t):
                    yield binding
                    return
            return
        for cls in schema.subclasses(atom.cls):
            for subj in store.subjects(RDF_TYPE, cls):
                yield _bind(binding, atom.arg, subj)
        return
    s = _value(atom.subject, binding)
    o = _value(atom.object, binding)
    if isinstance(s, Literal):
        return
    for prop in schema.subproperties(atom.prop):
        for t in store.triples(s, prop, o):
            b = _bind(binding, atom.subject, t.subject)
            if b is not None:
                b = _bind(b, atom.object, t.object)
                if b is not None:
                    yield b


def _bound_count(atom: RuleAtom, bound: set[str]) -> int:
    return sum(1 for a in atom.args if not isinstance(a, Var) or a.name in bound)


def _solve(atoms: list[RuleAtom], binding: dict, store: Graph, schema: Schema) -> Iterator[dict]:
    if not atoms:
        yield binding
        return
    bound = set(binding)
    # most bound arguments first; ties keep textual order
    best = max(range(len(atoms)), key=lambda i: (_bound_count(atoms[i], bound), -i))
    atom, rest = atoms[best], atoms[:best] + atoms[best + 1:]
    for b in _match_atom(atom, binding, store, schema):
        yield from _solve(rest, b, store, schema)


def _instantiate(head: PropertyAtom, binding: Mapping[str, Term]) -> Triple | None:
    s, o = _value(head.subject, binding), _value(head.object, binding)
    if s is None or o is None or isinstance(s, Literal):
        return None
    return Triple(s, head.prop, o)


def _binding_key(rule_index: int, binding: Mapping[str, Term]) -> tuple:
    return (rule_index, tuple((k, term_key(v)) for k, v in sorted(binding.items())))


def _commit(candidates: dict, store: Graph, out: list, round_no: int, rules: list[Rule]) -> Graph:
    delta = Graph()
    for triple in sorted(candidates, key=triple_key):
        rule_index, binding = candidates[triple]
        store.add(triple)
        delta.add(triple)
        out.append(DerivedTriple(triple, rules[rule_index].id, dict(sorted(binding.items())), round_no))
    return delta


def _offer(candidates: dict, store: Graph, triple: Triple | None, rule_index: int, binding: dict) -> None:
    if triple is None or triple in store:
        return
    current = candidates.get(triple)
    if current is None or _binding_key(rule_index, binding) < _binding_key(*current):
        candidates[triple] = (rule_index, binding)


def _check_safe(rules: Iterable[Rule]) -> list[Rule]:
    rules = list(rules)
    for r in rules:
        missing = check_rule_safety(r)
        if missing:
            raise RuleSafetyError(r.id, list(missing), 0)
    return rules


def materialize(g: Graph, s: Schema, rules: Iterable[Rule]) -> list[DerivedTriple]:
    """Semi-naive forward chaining to a fixpoint.

    Round 0 evaluates every rule against the input graph. Each later round
    only considers joins in which at least one atom is matched against the
    triples derived in the previous round. Returns the new triples with the
    rule and bindings that first produced them, ordered by round and then by
    canonical triple order.
    """
    rules = _check_safe(rules)
    store = g.copy()
    derived: list[DerivedTriple] = []

    candidates: dict = {}
    for idx, rule in enumerate(rules):
        for b in _solve(list(rule.body), {}, store, s):
            _offer(candidates, store, _instantiate(rule.head, b), idx, b)
    delta = _commit(candidates, store, derived, 0, rules)

    round_no = 0
    while len(delta):
        round_no += 1
        candidates = {}
        for idx, rule in enumerate(rules):
            body = list(rule.body)
            for i, atom in enumerate(body):
                rest = body[:i] + body[i + 1:]
                for b in _match_atom(atom, {}, delta, s):
                    for full in _solve(rest, b, store, s):
                        _offer(candidates, store, _instantiate(rule.head, full), idx, full)
        delta = _commit(candidates, store, derived, round_no, rules)
    return derived


def materialize_naive(g: Graph, s: Schema, rules: Iterable[Rule]) -> list[DerivedTriple]:
    """Reference evaluator: re-runs every rule over everything until nothing changes.

    Atoms are joined left to right by scanning the full fact list, with no
    index use or reordering, so it shares no join machinery with
    :func:`materialize`.
    """
    rules = _check_safe(rules)
    facts: set[Triple] = set(g.triples())
    derived: list[DerivedTriple] = []
    round_no = 0
    while True:
        by_pred = defaultdict(list)
        for t in facts:
            by_pred[t.predicate].append(t)
        new: dict[Triple, tuple[str, dict]] = {}
        for rule in rules:
            for b in _naive_join(list(rule.body), {}, facts, by_pred, s):
                t = _instantiate(rule.head, b)
                if t is not None and t not in facts and t not in new:
                    new[t] = (rule.id, b)
        if not new:
            return derived
        for t in sorted(new, key=triple_key):
            derived.append(DerivedTriple(t, new[t][0], dict(sorted(new[t][1].items())), round_no))
        facts.update(new)
        round_no += 1


def _naive_join(atoms, binding, facts, by_pred, schema) -> Iterator[dict]:
    if not atoms:
        yield binding
        return
    atom, rest = atoms[0], atoms[1:]
    if isinstance(atom, ClassAtom):
        for t in by_pred.get(RDF_TYPE, ()):
            if isinstance(t.object, Iri) and atom.cls in schema.superclasses(t.object):
                b = _bind(binding, atom.arg, t.subject)
                if b is not None:
                    yield from _naive_join(rest, b, facts, by_pred, schema)
        return
    for pred, triples in by_pred.items():
        if atom.prop not in schema.superproperties(pred):
            continue
        for t in triples:
            b = _bind(binding, atom.subject, t.subject)
            if b is not None:
                b = _bind(b, atom.object, t.object)
                if b is not None:
                    yield from _naive_join(rest, b, facts, by_pred, schema)


def inferred_graph(derived: Iterable[DerivedTriple], prefixes: PrefixMap | None = None) -> Graph:
    return Graph((d.triple for d in derived), prefixes.copy() if prefixes else None)


def merged_graph(g: Graph, derived: Iterable[DerivedTriple]) -> Graph:
    out = g.copy()
    out.update(d.triple for d in derived)
    return out


__all__ = [
    "Var",
    "ClassAtom",
    "PropertyAtom",
    "Rule",
    "DerivedTriple",
    "parse_rules",
    "parse_rules_file",
    "check_rule_safety",
    "materialize",
    "materialize_naive",
    "inferred_graph",
    "merged_graph",
]
