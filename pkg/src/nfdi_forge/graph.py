"""Indexed in-memory triple store and prefix handling."""

from __future__ import annotations

import re
from collections import defaultdict
from typing import Iterable, Iterator, Mapping

from .errors import FrozenGraphError, PrefixConflictError, StructuralError, UnresolvedPrefixError
from .terms import BlankNode, Iri, Literal, Term, Triple, check_triple, term_key, triple_key

_LOCAL_SAFE = re.compile(r"^[A-Za-z0-9_]([A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?$")
_LABEL = re.compile(r"^([A-Za-z][A-Za-z0-9_\-.]*)?$")


class PrefixMap:
    """Mapping of prefix label to namespace string."""

    def __init__(self, entries: Mapping[str, str] | None = None):
        self._entries: dict[str, str] = {}
        for label, ns in (entries or {}).items():
            self.bind(label, ns)

    def bind(self, label: str, namespace: str | Iri, replace: bool = True) -> None:
        namespace = str(namespace)
        if not _LABEL.match(label) or label.endswith("."):
            raise StructuralError(f"invalid prefix label {label!r}")
        Iri(namespace)  # validates
        current = self._entries.get(label)
        if current is not None and current != namespace and not replace:
            raise PrefixConflictError(label, current, namespace)
        self._entries[label] = namespace

    def merge(self, other: "PrefixMap") -> None:
        """Add every binding of ``other``; a label bound differently raises."""
        for label, ns in other.items():
            self.bind(label, ns, replace=False)

    def expand(self, curie: str) -> Iri:
        return expand_curie(self, curie)

    def compact(self, iri: Iri) -> str | None:
        """Return ``label:local`` using the longest matching namespace, or None."""
        value = iri.value
        best = None
        for label, ns in self._entries.items():
            if value.startswith(ns) and (best is None or len(ns) > len(best[1])
                                         or (len(ns) == len(best[1]) and label < best[0])):
                local = value[len(ns):]
                if local == "" or _LOCAL_SAFE.match(local):
                    best = (label, ns)
        if best is None:
            return None
        return f"{best[0]}:{value[len(best[1]):]}"

    def get(self, label: str) -> str | None:
        return self._entries.get(label)

    def items(self):
        return sorted(self._entries.items())

    def copy(self) -> "PrefixMap":
        return PrefixMap(dict(self._entries))

    def __contains__(self, label) -> bool:
        return label in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrefixMap) and self._entries == other._entries

    def __repr__(self) -> str:
        return f"PrefixMap({dict(self.items())!r})"


def expand_curie(pm: PrefixMap, curie: str) -> Iri:
    label, sep, local = curie.partition(":")
    if not sep:
        raise StructuralError(f"not a CURIE: {curie!r}")
    ns = pm.get(label)
    if ns is None:
        raise UnresolvedPrefixError(label)
    return Iri(ns + local)


class Graph:
    """A set of triples with subject-, predicate- and object-first indexes.

    Graphs are writable until :meth:`freeze` is called. Reads work in either
    phase, but only frozen graphs may be shared between threads.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: PrefixMap | None = None):
        self.prefixes = prefixes if prefixes is not None else PrefixMap()
        self._triples: set[Triple] = set()
        self._spo: dict = defaultdict(lambda: defaultdict(set))
        self._pos: dict = defaultdict(lambda: defaultdict(set))
        self._osp: dict = defaultdict(lambda: defaultdict(set))
        self._count = ({}, {}, {})
        self._frozen = False
        for t in triples:
            self.add(t)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> "Graph":
        self._frozen = True
        return self

    def add(self, t: Triple) -> bool:
        if self._frozen:
            raise FrozenGraphError("graph is frozen")
        if not isinstance(t, Triple):
            t = Triple(*t)
        check_triple(t)
        if t in self._triples:
            return False
        s, p, o = t
        self._triples.add(t)
        self._spo[s][p].add(o)
        self._pos[p][o].add(s)
        self._osp[o][s].add(p)
        for counts, key in zip(self._count, t):
            counts[key] = counts.get(key, 0) + 1
        return True

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.add(t))

    def copy(self) -> "Graph":
        """Unfrozen copy sharing no index state."""
        return Graph(self._triples, self.prefixes.copy())

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=triple_key))

    def triples(self, s: Term | None = None, p: Iri | None = None, o: Term | None = None) -> Iterator[Triple]:
        """Unordered match; picks the index of the most selective bound position."""
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            if t in self._triples:
                yield t
            return
        bound = [(self._count[i].get(term, 0), i) for i, term in enumerate((s, p, o)) if term is not None]
        if not bound:
            yield from self._triples
            return
        size, pos = min(bound)
        if size == 0:
            return
        if pos == 0:
            for pred, objs in self._spo[s].items():
                if p is not None and pred != p:
                    continue
                for obj in objs:
                    if o is None or obj == o:
                        yield Triple(s, pred, obj)
        elif pos == 1:
            for obj, subjs in self._pos[p].items():
                if o is not None and obj != o:
                    continue
                for subj in subjs:
                    if s is None or subj == s:
                        yield Triple(subj, p, obj)
        else:
            for subj, preds in self._osp[o].items():
                if s is not None and subj != s:
                    continue
                for pred in preds:
                    if p is None or pred == p:
                        yield Triple(subj, pred, o)

    def match_pattern(self, s: Term | None = None, p: Iri | None = None, o: Term | None = None) -> Iterator[Triple]:
        """Yield matching triples in canonical term order."""
        return iter(sorted(self.triples(s, p, o), key=triple_key))

    def count(self, s=None, p=None, o=None) -> int:
        if s is None and p is None and o is None:
            return len(self._triples)
        if (s is None) + (p is None) + (o is None) == 2:
            for i, term in enumerate((s, p, o)):
                if term is not None:
                    return self._count[i].get(term, 0)
        return sum(1 for _ in self.triples(s, p, o))

    def objects(self, s: Term, p: Iri) -> set[Term]:
        return set(self._spo[s][p]) if s in self._spo and p in self._spo[s] else set()

    def subjects(self, p: Iri, o: Term) -> set[Term]:
        return set(self._pos[p][o]) if p in self._pos and o in self._pos[p] else set()

    def index_sizes(self) -> tuple[int, int, int]:
        """Number of triples reachable through each index (for coherence checks)."""
        spo = sum(len(objs) for preds in self._spo.values() for objs in preds.values())
        pos = sum(len(subjs) for objs in self._pos.values() for subjs in objs.values())
        osp = sum(len(preds) for subjs in self._osp.values() for preds in subjs.values())
        return spo, pos, osp

    def terms(self) -> set[Term]:
        out: set[Term] = set()
        for t in self._triples:
            out.update(t)
        return out

    def blank_nodes(self) -> set[BlankNode]:
        return {x for t in self._triples for x in (t.subject, t.object) if isinstance(x, BlankNode)}

    def __or__(self, other: "Graph") -> "Graph":
        g = Graph(self._triples, self.prefixes.copy())
        g.update(other._triples)
        for label, ns in other.prefixes.items():
            if label not in g.prefixes:
                g.prefixes.bind(label, ns)
        return g

    def __repr__(self) -> str:
        state = "frozen" if self._frozen else "open"
        return f"<Graph {len(self)} triples, {state}>"


def insert_triple(graph: Graph, t: Triple) -> bool:
    return graph.add(t)


def match_pattern(graph: Graph, s=None, p=None, o=None) -> Iterator[Triple]:
    return graph.match_pattern(s, p, o)


# -- isomorphism ---------------------------------------------------------------

def _signature(triples, colors, node):
    parts = []
    for s, p, o in triples:
        if s == node:
            parts.append(("s", p.value, colors.get(o, o.nt()) if o != node else "self"))
        if o == node:
            parts.append(("o", p.value, colors.get(s, s.nt()) if s != node else "self"))
    return hash(tuple(sorted(parts)))


def _refine(triples, nodes):
    by_node = defaultdict(list)
    for t in triples:
        if isinstance(t.subject, BlankNode):
            by_node[t.subject].append(t)
        if isinstance(t.object, BlankNode) and t.object != t.subject:
            by_node[t.object].append(t)
    colors = {n: "b" for n in nodes}
    for _ in range(len(nodes) + 1):
        new = {n: str(_signature(by_node[n], colors, n)) for n in nodes}
        if len(set(new.values())) == len(set(colors.values())):
            colors = new
            break
        colors = new
    return colors


def isomorphic(a: Graph | Iterable[Triple], b: Graph | Iterable[Triple]) -> bool:
    """Graph isomorphism allowing a bijective renaming of blank nodes."""
    ta, tb = set(a), set(b)
    if len(ta) != len(tb):
        return False

    def has_bnode(t):
        return isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode)

    ground_a = {t for t in ta if not has_bnode(t)}
    ground_b = {t for t in tb if not has_bnode(t)}
    if ground_a != ground_b:
        return False
    rest_a, rest_b = ta - ground_a, tb - ground_b
    nodes_a = sorted(Graph(rest_a).blank_nodes(), key=term_key)
    nodes_b = sorted(Graph(rest_b).blank_nodes(), key=term_key)
    if len(nodes_a) != len(nodes_b):
        return False
    col_a, col_b = _refine(rest_a, nodes_a), _refine(rest_b, nodes_b)
    if sorted(col_a.values()) != sorted(col_b.values()):
        return False
    candidates = {n: [m for m in nodes_b if col_b[m] == col_a[n]] for n in nodes_a}
    order = sorted(nodes_a, key=lambda n: len(candidates[n]))

    def rename(t, mapping):
        s = mapping.get(t.subject, t.subject) if isinstance(t.subject, BlankNode) else t.subject
        o = mapping.get(t.object, t.object) if isinstance(t.object, BlankNode) else t.object
        return Triple(s, t.predicate, o)

    def consistent(mapping):
        for t in rest_a:
            if all(not isinstance(x, BlankNode) or x in mapping for x in (t.subject, t.object)):
                if rename(t, mapping) not in rest_b:
                    return False
        return True

    def search(i, mapping, used):
        if i == len(order):
            return {rename(t, mapping) for t in rest_a} == rest_b
        node = order[i]
        for cand in candidates[node]:
            if cand in used:
                continue
            mapping[node] = cand
            used.add(cand)
            if consistent(mapping) and search(i + 1, mapping, used):
                return True
            del mapping[node]
            used.discard(cand)
        return False

    return search(0, {}, set())


__all__ = [
    "Graph",
    "PrefixMap",
    "expand_curie",
    "insert_triple",
    "match_pattern",
    "isomorphic",
    "Iri",
    "Literal",
    "BlankNode",
    "Triple",
]
