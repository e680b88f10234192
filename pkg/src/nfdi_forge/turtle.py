"""Turtle and N-Triples reading and writing.

Only the dialect the fixtures need is accepted. Collections, nested
anonymous blank nodes and numeric/boolean shorthand are rejected with a
``bad-structure`` error instead of being half supported.
"""

from __future__ import annotations

import re
from urllib.parse import urljoin

from .errors import ParseError, StructuralError
from .graph import Graph, PrefixMap
from .terms import BlankNode, Iri, Literal, Term, Triple, escape_string, term_key
from .vocab import RDF_TYPE, XSD

_PNAME = re.compile(
    r"([A-Za-z][A-Za-z0-9_\-.]*)?:((?:[A-Za-z0-9_:]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%])"
    r"(?:[A-Za-z0-9_\-.:]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%])*)?"
)
_BNODE = re.compile(r"_:([A-Za-z0-9_][A-Za-z0-9_\-.]*)")
_LANGTAG = re.compile(r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)")
_IRI_BAD = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")

_STRING_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class _Reader:
    def __init__(self, text: str, base: str, dialect: str):
        if text.startswith("\ufeff"):
            text = text[1:]
        self.text = text
        self.pos = 0
        self.base = base
        self.dialect = dialect
        self.prefixes = PrefixMap()
        self.graph = Graph(prefixes=self.prefixes)
        self.labels_in_text = set(_BNODE.findall(text))

    # -- position helpers ------------------------------------------------------

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, kind: str, message: str, pos: int | None = None):
        line, col = self.where(pos)
        raise ParseError(kind, message, line, col)

    def skip_ws(self) -> None:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self.pos += 1
            elif ch == "#":
                end = text.find("\n", self.pos)
                self.pos = len(text) if end < 0 else end
            else:
                break

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            self.fail("bad-structure", f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def at_keyword(self, word: str, case_sensitive: bool = True) -> bool:
        chunk = self.text[self.pos:self.pos + len(word)]
        if (chunk if case_sensitive else chunk.lower()) != word:
            return False
        after = self.text[self.pos + len(word):self.pos + len(word) + 1]
        return not (after.isalnum() or after in "_:-")

    # -- document --------------------------------------------------------------

    def parse(self) -> Graph:
        while self.peek():
            if self.dialect == "turtle" and self.directive():
                continue
            self.statement()
        return self.graph

    def directive(self) -> bool:
        start = self.pos
        if self.text.startswith("@prefix", self.pos):
            self.pos += len("@prefix")
            self._prefix_body(start, sparql=False)
            return True
        if self.text.startswith("@base", self.pos):
            self.pos += len("@base")
            self.base = self.iri_ref().value
            self.expect(".")
            return True
        if self.at_keyword("prefix", case_sensitive=False):
            self.pos += len("prefix")
            self._prefix_body(start, sparql=True)
            return True
        if self.at_keyword("base", case_sensitive=False):
            self.pos += len("base")
            self.base = self.iri_ref().value
            return True
        return False

    def _prefix_body(self, start: int, sparql: bool) -> None:
        self.skip_ws()
        m = re.compile(r"([A-Za-z][A-Za-z0-9_\-.]*)?:").match(self.text, self.pos)
        if not m or (m.group(1) or "").endswith("."):
            self.fail("bad-token", "expected prefix label")
        self.pos = m.end()
        ns = self.iri_ref()
        self.prefixes.bind(m.group(1) or "", ns.value)
        if not sparql:
            self.expect(".")

    def statement(self) -> None:
        if self.peek() == "[":
            subject = self.anon_bnode(nested=False)
            if self.peek() == ".":
                self.pos += 1
                return
        else:
            subject = self.subject()
        self.predicate_object_list(subject)
        self.expect(".")

    def predicate_object_list(self, subject) -> None:
        while True:
            predicate = self.verb()
            self.object_list(subject, predicate)
            if self.dialect != "turtle" or self.peek() != ";":
                return
            while self.peek() == ";":
                self.pos += 1
            if self.peek() in (".", "]", ""):
                return

    def object_list(self, subject, predicate) -> None:
        while True:
            obj_pos = self.pos
            obj = self.object()
            self.emit(subject, predicate, obj, obj_pos)
            if self.dialect != "turtle" or self.peek() != ",":
                return
            self.pos += 1

    def emit(self, s, p, o, pos) -> None:
        try:
            self.graph.add(Triple(s, p, o))
        except StructuralError as exc:
            self.fail("bad-structure", str(exc), pos)

    def anon_bnode(self, nested: bool) -> BlankNode:
        if self.dialect != "turtle":
            self.fail("bad-structure", "anonymous blank nodes are not allowed in N-Triples")
        if nested:
            self.fail("bad-structure", "nested anonymous blank nodes are not supported")
        self.expect("[")
        node = self.fresh_bnode()
        if self.peek() != "]":
            self._in_anon = True
            try:
                self.predicate_object_list(node)
            finally:
                self._in_anon = False
        self.expect("]")
        return node

    _in_anon = False
    _anon_counter = 0

    def fresh_bnode(self) -> BlankNode:
        while True:
            self._anon_counter += 1
            label = f"anon{self._anon_counter}"
            if label not in self.labels_in_text:
                return BlankNode(label)

    # -- terms -----------------------------------------------------------------

    def subject(self) -> Term:
        ch = self.peek()
        if ch == "(":
            self.fail("bad-structure", "collections are not supported")
        if ch == '"' or ch == "'":
            self.fail("bad-structure", "literal in subject position")
        term = self.term(position="subject")
        if isinstance(term, Literal):
            self.fail("bad-structure", "literal in subject position")
        return term

    def verb(self) -> Iri:
        self.peek()
        if self.dialect == "turtle" and self.text.startswith("a", self.pos) and self.at_keyword("a"):
            self.pos += 1
            return RDF_TYPE
        start = self.pos
        term = self.term(position="predicate")
        if not isinstance(term, Iri):
            self.fail("bad-structure", "predicate must be an IRI", start)
        return term

    def object(self) -> Term:
        ch = self.peek()
        if ch == "[":
            return self.anon_bnode(nested=self._in_anon)
        if ch == "(":
            self.fail("bad-structure", "collections are not supported")
        return self.term(position="object")

    def term(self, position: str) -> Term:
        self.skip_ws()
        text, pos = self.text, self.pos
        if pos >= len(text):
            self.fail("bad-structure", f"unexpected end of input, expected {position}")
        ch = text[pos]
        if ch == "<":
            return self.iri_ref()
        if ch == "_" and text.startswith("_:", pos):
            m = _BNODE.match(text, pos)
            if not m:
                self.fail("bad-token", "malformed blank node label")
            label = m.group(1)
            while label.endswith("."):
                label = label[:-1]
            self.pos = pos + 2 + len(label)
            return BlankNode(label)
        if ch in "\"'":
            return self.literal()
        if ch in "+-.0123456789" and _NUMBER.match(text, pos) and self.dialect == "turtle":
            self.fail("bad-structure", "numeric literal shorthand is not supported")
        if self.dialect != "turtle":
            self.fail("bad-token", f"unexpected character {ch!r}")
        if self.at_keyword("true") or self.at_keyword("false"):
            self.fail("bad-structure", "boolean literal shorthand is not supported")
        return self.prefixed_name()

    def iri_ref(self) -> Iri:
        self.skip_ws()
        start = self.pos
        if not self.text.startswith("<", start):
            self.fail("bad-token", "expected IRI reference")
        end = self.text.find(">", start + 1)
        newline = self.text.find("\n", start + 1)
        if end < 0 or (0 <= newline < end):
            self.fail("bad-iri", "unterminated IRI reference")
        raw = self.text[start + 1:end]
        raw = re.sub(r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})",
                     lambda m: chr(int(m.group(1) or m.group(2), 16)), raw)
        bad = _IRI_BAD.search(raw)
        if bad:
            self.fail("bad-iri", f"illegal character {bad.group()!r} in IRI", start + 1 + bad.start())
        if ":" not in raw:
            if self.dialect != "turtle":
                self.fail("bad-iri", "relative IRI not allowed in N-Triples", start)
            raw = urljoin(self.base, raw) if self.base else raw
        self.pos = end + 1
        try:
            return Iri(raw)
        except StructuralError as exc:
            self.fail("bad-iri", str(exc), start)

    def prefixed_name(self) -> Iri:
        start = self.pos
        m = _PNAME.match(self.text, start)
        if not m:
            self.fail("bad-token", f"unexpected character {self.text[start]!r}")
        label, local = m.group(1) or "", m.group(2) or ""
        while local.endswith(".") and not local.endswith("\\."):
            local = local[:-1]
        if label.endswith("."):
            self.fail("bad-token", "prefix label may not end with '.'")
        self.pos = start + len(label) + 1 + len(local)
        ns = self.prefixes.get(label)
        if ns is None:
            self.fail("unknown-prefix", f"unknown prefix {label!r}", start)
        local = re.sub(r"\\(.)", r"\1", local)
        try:
            return Iri(ns + local)
        except StructuralError as exc:
            self.fail("bad-iri", str(exc), start)

    def literal(self) -> Literal:
        text, start = self.text, self.pos
        quote = text[start]
        long_quote = quote * 3
        is_long = text.startswith(long_quote, start) and self.dialect == "turtle"
        i = start + (3 if is_long else 1)
        chars = []
        while True:
            if i >= len(text):
                self.fail("unterminated-literal", "unterminated string literal", start)
            ch = text[i]
            if is_long and text.startswith(long_quote, i):
                i += 3
                break
            if not is_long and ch == quote:
                i += 1
                break
            if not is_long and ch in "\r\n":
                self.fail("unterminated-literal", "unterminated string literal", start)
            if ch == "\\":
                nxt = text[i + 1:i + 2]
                if nxt in _STRING_ESCAPES:
                    chars.append(_STRING_ESCAPES[nxt])
                    i += 2
                    continue
                if nxt in ("u", "U"):
                    width = 4 if nxt == "u" else 8
                    digits = text[i + 2:i + 2 + width]
                    if not re.fullmatch(r"[0-9A-Fa-f]{%d}" % width, digits):
                        self.fail("bad-token", "malformed unicode escape", i)
                    chars.append(chr(int(digits, 16)))
                    i += 2 + width
                    continue
                self.fail("bad-token", f"invalid escape sequence \\{nxt}", i)
            chars.append(ch)
            i += 1
        self.pos = i
        lexical = "".join(chars)
        m = _LANGTAG.match(text, self.pos)
        if m:
            self.pos = m.end()
            try:
                return Literal(lexical, language=m.group(1))
            except StructuralError as exc:
                self.fail("bad-token", str(exc), m.start())
        if text.startswith("^^", self.pos):
            self.pos += 2
            if text.startswith("<", self.pos):
                datatype = self.iri_ref()
            elif self.dialect == "turtle":
                datatype = self.prefixed_name()
            else:
                self.fail("bad-token", "datatype must be an IRI reference")
            try:
                return Literal(lexical, datatype)
            except StructuralError as exc:
                self.fail("bad-structure", str(exc), start)
        return Literal(lexical)


def parse(text: str, base_iri: Iri | str | None = None, dialect: str = "turtle") -> tuple[Graph, PrefixMap]:
    """Parse a Turtle or N-Triples document into an unfrozen graph and its prefixes."""
    if dialect not in ("turtle", "ntriples"):
        raise ValueError(f"unknown dialect {dialect!r}")
    reader = _Reader(text, str(base_iri) if base_iri else "", dialect)
    graph = reader.parse()
    return graph, reader.prefixes


def parse_file(path, dialect: str | None = None, base_iri: str | None = None) -> tuple[Graph, PrefixMap]:
    path = str(path)
    if dialect is None:
        dialect = "ntriples" if path.endswith(".nt") else "turtle"
    with open(path, encoding="utf-8-sig") as fh:
        text = fh.read()
    return parse(text, base_iri, dialect)


# -- writing -----------------------------------------------------------------


def _term_ttl(term: Term, pm: PrefixMap) -> str:
    if isinstance(term, Iri):
        curie = pm.compact(term)
        return curie if curie is not None else term.nt()
    if isinstance(term, Literal):
        body = f'"{escape_string(term.lexical)}"'
        if term.language:
            return f"{body}@{term.language}"
        if term.datatype == XSD.string:
            return body
        return f"{body}^^{_term_ttl(term.datatype, pm)}"
    return term.nt()


def serialize(graph: Graph, pm: PrefixMap | None = None, dialect: str = "turtle") -> str:
    """Deterministic Turtle or N-Triples text for ``graph``."""
    if dialect == "ntriples":
        return "".join(t.nt() + "\n" for t in graph)
    if dialect != "turtle":
        raise ValueError(f"unknown dialect {dialect!r}")
    pm = pm if pm is not None else graph.prefixes
    lines = [f"@prefix {label}: <{ns}> ." for label, ns in pm.items()]
    by_subject: dict = {}
    for t in graph:
        by_subject.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)
    if lines and by_subject:
        lines.append("")
    for subject in sorted(by_subject, key=term_key):
        preds = by_subject[subject]
        chunks = []
        for pred in sorted(preds, key=lambda p: (p != RDF_TYPE, term_key(p))):
            verb = "a" if pred == RDF_TYPE else _term_ttl(pred, pm)
            objs = ", ".join(_term_ttl(o, pm) for o in sorted(preds[pred], key=term_key))
            chunks.append(f"{verb} {objs}")
        lines.append(f"{_term_ttl(subject, pm)} " + " ;\n    ".join(chunks) + " .")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_term(text: str, pm: PrefixMap) -> Term:
    """Parse one term written as ``<iri>``, ``prefix:local``, ``_:b`` or a literal."""
    reader = _Reader(text, "", "turtle")
    reader.prefixes = pm
    term = reader.term(position="object")
    if reader.peek():
        reader.fail("bad-structure", "trailing input after term")
    return term


__all__ = ["parse", "parse_file", "serialize", "parse_term", "ParseError"]
