"""RDF term model: IRIs, literals, blank nodes and triples."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Union

from .errors import StructuralError

XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

_WS = re.compile(r"\s")
_LANG = re.compile(r"^[a-z]{1,8}(-[a-z0-9]{1,8})*$")
_BNODE_LABEL = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")

_NT_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _NT_ESCAPES:
            out.append(_NT_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not self.value:
            raise StructuralError("IRI must be a non-empty string")
        if _WS.search(self.value) or ":" not in self.value:
            raise StructuralError(f"invalid IRI {self.value!r}")

    def nt(self) -> str:
        return f"<{self.value}>"

    def __str__(self):
        return self.value


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: Iri
    language: str | None

    def __init__(self, lexical: str, datatype: Iri | str | None = None, language: str | None = None):
        if lexical is None:
            raise StructuralError("literal lexical form may not be null")
        if language is not None:
            language = language.lower()
            if not _LANG.match(language):
                raise StructuralError(f"malformed language tag {language!r}")
            if datatype is not None and str(datatype) != RDF_LANGSTRING:
                raise StructuralError("language-tagged literals must use rdf:langString")
            datatype = Iri(RDF_LANGSTRING)
        elif datatype is None:
            datatype = Iri(XSD_STRING)
        elif not isinstance(datatype, Iri):
            datatype = Iri(datatype)
        if language is None and datatype.value == RDF_LANGSTRING:
            raise StructuralError("rdf:langString literal requires a language tag")
        object.__setattr__(self, "lexical", str(lexical))
        object.__setattr__(self, "datatype", datatype)
        object.__setattr__(self, "language", language)

    def nt(self) -> str:
        body = f'"{escape_string(self.lexical)}"'
        if self.language:
            return f"{body}@{self.language}"
        if self.datatype.value == XSD_STRING:
            return body
        return f"{body}^^{self.datatype.nt()}"

    def __str__(self):
        return self.lexical


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self):
        if not self.label or not _BNODE_LABEL.match(self.label) or self.label.endswith("."):
            raise StructuralError(f"invalid blank node label {self.label!r}")

    def nt(self) -> str:
        return f"_:{self.label}"

    def __str__(self):
        return self.nt()


Term = Union[Iri, Literal, BlankNode]

_KIND_RANK = {Iri: 0, BlankNode: 1, Literal: 2}


def term_key(term: Term) -> tuple[int, str]:
    """Canonical sort key: IRIs < blank nodes < literals, then by N-Triples form."""
    return (_KIND_RANK[type(term)], term.nt())


class Triple(NamedTuple):
    subject: Iri | BlankNode
    predicate: Iri
    object: Term

    def nt(self) -> str:
        return f"{self.subject.nt()} {self.predicate.nt()} {self.object.nt()} ."


def triple_key(t: Triple) -> tuple:
    return (term_key(t.subject), term_key(t.predicate), term_key(t.object))


def check_triple(t: Triple) -> None:
    if not isinstance(t.subject, (Iri, BlankNode)):
        raise StructuralError(f"{type(t.subject).__name__} not allowed in subject position: {t.subject!r}")
    if not isinstance(t.predicate, Iri):
        raise StructuralError(f"predicate must be an IRI, got {t.predicate!r}")
    if not isinstance(t.object, (Iri, BlankNode, Literal)):
        raise StructuralError(f"object is not an RDF term: {t.object!r}")
