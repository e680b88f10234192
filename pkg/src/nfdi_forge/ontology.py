"""Schema extraction, subclass closure, module composition and intersection axioms."""

from __future__ import annotations

import json
import logging
import os
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ImportCycleError, ModuleError, PrefixConflictError, SchemaError, UnresolvedImportError
from .graph import Graph, PrefixMap
from .terms import BlankNode, Iri, Triple, term_key
from .turtle import parse_file
from .vocab import (
    BFO_CONTINUANT,
    BFO_INDEPENDENT_CONTINUANT,
    BFO_OCCURRENT,
    BFO_PROCESS,
    BFO_ROLE,
    OWL_ANNOTATIONPROPERTY,
    OWL_CLASS,
    OWL_DATATYPEPROPERTY,
    OWL_DISJOINTWITH,
    OWL_EQUIVALENTCLASS,
    OWL_INTERSECTIONOF,
    OWL_OBJECTPROPERTY,
    RDF_FIRST,
    RDF_NIL,
    RDF_PROPERTY,
    RDF_REST,
    RDF_TYPE,
    RDFS_CLASS,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
)

log = logging.getLogger(__name__)

MODULE_PATH_ENV = "NFDI_FORGE_MODULE_PATH"


@dataclass(frozen=True)
class IntersectionAxiom:
    """``defined_class`` is equivalent to the intersection of ``operands``."""

    defined_class: Iri
    operands: tuple[Iri, ...]

    def __post_init__(self):
        if len(self.operands) < 2:
            raise SchemaError(
                f"intersection axiom for {self.defined_class.value} needs at least 2 operands",
                self.defined_class,
            )
        if self.defined_class in self.operands:
            raise SchemaError(
                f"{self.defined_class.value} appears among its own intersection operands",
                self.defined_class,
            )


def _reachable(edges: Iterable[tuple[Iri, Iri]], nodes: Iterable[Iri]) -> dict[Iri, frozenset[Iri]]:
    """Reflexive-transitive successors for every node."""
    succ = defaultdict(set)
    for a, b in edges:
        succ[a].add(b)
    out = {}
    for start in nodes:
        seen = {start}
        queue = deque([start])
        while queue:
            for nxt in succ[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        out[start] = frozenset(seen)
    return out


def _invert(reach: Mapping[Iri, frozenset[Iri]]) -> dict[Iri, frozenset[Iri]]:
    inv = defaultdict(set)
    for a, ups in reach.items():
        for b in ups:
            inv[b].add(a)
    return {k: frozenset(v) for k, v in inv.items()}


@dataclass(frozen=True)
class Schema:
    classes: frozenset = frozenset()
    subclass_of: frozenset = frozenset()
    properties: frozenset = frozenset()
    subproperty_of: frozenset = frozenset()
    disjoint_pairs: frozenset = frozenset()
    domain_of: Mapping[Iri, frozenset] = field(default_factory=dict)
    range_of: Mapping[Iri, frozenset] = field(default_factory=dict)
    intersection_axioms: tuple[IntersectionAxiom, ...] = ()

    @cached_property
    def _up(self) -> dict[Iri, frozenset[Iri]]:
        return _reachable(self.subclass_of, self.classes)

    @cached_property
    def _down(self) -> dict[Iri, frozenset[Iri]]:
        return _invert(self._up)

    @cached_property
    def _prop_up(self) -> dict[Iri, frozenset[Iri]]:
        return _reachable(self.subproperty_of, self.properties)

    @cached_property
    def _prop_down(self) -> dict[Iri, frozenset[Iri]]:
        return _invert(self._prop_up)

    def superclasses(self, cls: Iri) -> frozenset[Iri]:
        """Reflexive superclasses; unknown classes are only their own superclass."""
        return self._up.get(cls, frozenset((cls,)))

    def subclasses(self, cls: Iri) -> frozenset[Iri]:
        return self._down.get(cls, frozenset((cls,)))

    def superproperties(self, prop: Iri) -> frozenset[Iri]:
        return self._prop_up.get(prop, frozenset((prop,)))

    def subproperties(self, prop: Iri) -> frozenset[Iri]:
        return self._prop_down.get(prop, frozenset((prop,)))

    def is_subclass(self, sub: Iri, sup: Iri) -> bool:
        return sup in self.superclasses(sub)

    def descendants(self, root: Iri) -> frozenset[Iri]:
        if root not in self.classes:
            return frozenset()
        return self.subclasses(root)

    @cached_property
    def role_classes(self) -> frozenset[Iri]:
        return self.descendants(BFO_ROLE)

    @cached_property
    def process_classes(self) -> frozenset[Iri]:
        return self.descendants(BFO_PROCESS)

    @cached_property
    def continuant_classes(self) -> frozenset[Iri]:
        return self.descendants(BFO_CONTINUANT)

    @cached_property
    def occurrent_classes(self) -> frozenset[Iri]:
        return self.descendants(BFO_OCCURRENT)

    @cached_property
    def independent_continuant_classes(self) -> frozenset[Iri]:
        return self.descendants(BFO_INDEPENDENT_CONTINUANT)

    def type_closure(self, types: Iterable[Iri]) -> frozenset[Iri]:
        out: set[Iri] = set()
        for t in types:
            out |= self.superclasses(t)
        return frozenset(out)


def _read_list(g: Graph, head, owner: Iri) -> list:
    items, seen = [], set()
    node = head
    while node != RDF_NIL:
        if node in seen:
            raise SchemaError(f"cyclic RDF list in axiom for {owner.value}", owner)
        seen.add(node)
        firsts, rests = g.objects(node, RDF_FIRST), g.objects(node, RDF_REST)
        if len(firsts) != 1 or len(rests) != 1:
            raise SchemaError(f"malformed RDF list in axiom for {owner.value}", owner)
        items.append(next(iter(firsts)))
        node = next(iter(rests))
    return items


def _intersection(g: Graph, defined: Iri, expr) -> IntersectionAxiom:
    lists = g.objects(expr, OWL_INTERSECTIONOF)
    if len(lists) != 1:
        raise SchemaError(
            f"unsupported class expression in equivalence for {defined.value}; only intersections of named classes are accepted",
            defined,
        )
    operands = _read_list(g, next(iter(lists)), defined)
    if not all(isinstance(op, Iri) for op in operands):
        raise SchemaError(f"intersection for {defined.value} has a non-named operand", defined)
    return IntersectionAxiom(defined, tuple(operands))


def extract_schema(g: Graph) -> Schema:
    """Read class/property hierarchy, disjointness, domain/range and intersection axioms."""
    classes: set[Iri] = set()
    properties: set[Iri] = set()
    subclass: set[tuple[Iri, Iri]] = set()
    subprop: set[tuple[Iri, Iri]] = set()
    disjoint: set[frozenset] = set()
    domains, ranges = defaultdict(set), defaultdict(set)
    axioms: dict[Iri, IntersectionAxiom] = {}

    for kind in (OWL_CLASS, RDFS_CLASS):
        classes.update(s for s in g.subjects(RDF_TYPE, kind) if isinstance(s, Iri))
    for kind in (OWL_OBJECTPROPERTY, OWL_DATATYPEPROPERTY, OWL_ANNOTATIONPROPERTY, RDF_PROPERTY):
        properties.update(s for s in g.subjects(RDF_TYPE, kind) if isinstance(s, Iri))

    for s, _, o in g.triples(None, RDFS_SUBCLASSOF, None):
        if isinstance(s, Iri) and isinstance(o, Iri):
            subclass.add((s, o))
    for s, _, o in g.triples(None, RDFS_SUBPROPERTYOF, None):
        if isinstance(s, Iri) and isinstance(o, Iri):
            subprop.add((s, o))
    for s, _, o in g.triples(None, OWL_DISJOINTWITH, None):
        if isinstance(s, Iri) and isinstance(o, Iri) and s != o:
            disjoint.add(frozenset((s, o)))
    for target, pred in ((domains, RDFS_DOMAIN), (ranges, RDFS_RANGE)):
        for s, _, o in g.triples(None, pred, None):
            if isinstance(s, Iri) and isinstance(o, Iri):
                target[s].add(o)
                properties.add(s)

    for s, _, o in sorted(g.triples(None, OWL_EQUIVALENTCLASS, None), key=lambda t: term_key(t.subject)):
        if isinstance(s, Iri) and isinstance(o, Iri):
            subclass.update({(s, o), (o, s)})
            continue
        if isinstance(s, Iri) and isinstance(o, BlankNode):
            axiom = _intersection(g, s, o)
        elif isinstance(o, Iri) and isinstance(s, BlankNode):
            axiom = _intersection(g, o, s)
        else:
            raise SchemaError("equivalence between two anonymous class expressions is not supported")
        axioms[axiom.defined_class] = axiom

    for a, b in subclass:
        classes.update((a, b))
    for pair in disjoint:
        classes.update(pair)
    for values in ranges.values():
        classes.update(v for v in values if not _is_datatype(v))
    for values in domains.values():
        classes.update(values)
    for axiom in axioms.values():
        classes.add(axiom.defined_class)
        classes.update(axiom.operands)
    for a, b in subprop:
        properties.update((a, b))

    return Schema(
        classes=frozenset(classes),
        subclass_of=frozenset(subclass),
        properties=frozenset(properties),
        subproperty_of=frozenset(subprop),
        disjoint_pairs=frozenset(disjoint),
        domain_of={p: frozenset(v) for p, v in domains.items()},
        range_of={p: frozenset(v) for p, v in ranges.items()},
        intersection_axioms=tuple(axioms[k] for k in sorted(axioms, key=term_key)),
    )


def _is_datatype(iri: Iri) -> bool:
    return iri.value.startswith("http://www.w3.org/2001/XMLSchema#") or iri.value in (
        "http://www.w3.org/2000/01/rdf-schema#Literal",
        "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString",
    )


def subclass_closure(s: Schema) -> frozenset[tuple[Iri, Iri]]:
    """Reflexive-transitive closure of subClassOf as ``(sub, super)`` pairs."""
    return frozenset((a, b) for a, ups in s._up.items() for b in ups)


# -- intersection axioms -------------------------------------------------------


def apply_intersection_axioms(g: Graph, s: Schema) -> set[Triple]:
    """New rdf:type triples entailed by the intersection equivalences.

    Both directions apply: an individual typed with every operand gains the
    defined class, and one typed with the defined class gains every operand.
    Subclass closure is taken between passes until nothing changes. Every
    class reached through an axiom and not already asserted is returned,
    plain superclasses are not.
    """
    if not s.intersection_axioms:
        return set()
    derived: set[Triple] = set()
    individuals = {t.subject for t in g.triples(None, RDF_TYPE, None)}
    for ind in sorted(individuals, key=term_key):
        asserted = {o for o in g.objects(ind, RDF_TYPE) if isinstance(o, Iri)}
        gained: set[Iri] = set()
        while True:
            closure = s.type_closure(asserted | gained)
            before = len(gained)
            for axiom in s.intersection_axioms:
                if all(op in closure for op in axiom.operands):
                    gained.add(axiom.defined_class)
                if axiom.defined_class in closure:
                    gained.update(axiom.operands)
            if len(gained) == before:
                break
        derived.update(Triple(ind, RDF_TYPE, c) for c in gained - asserted)
    return derived


# -- modules ---------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleManifest:
    module_id: str
    graph_path: Path
    imports: tuple[str, ...] = ()


def load_manifest(path) -> ModuleManifest:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return manifest_from_dict(data, path.parent, source=str(path))


def manifest_from_dict(data, base_dir: Path, source: str = "<manifest>") -> ModuleManifest:
    if not isinstance(data, dict):
        raise ModuleError(f"{source}: manifest must be a JSON object")
    missing = [k for k in ("id", "graph") if k not in data]
    if missing:
        raise ModuleError(f"{source}: manifest lacks field(s) {', '.join(missing)}")
    imports = data.get("imports", [])
    if not isinstance(imports, list) or not all(isinstance(i, str) for i in imports):
        raise ModuleError(f"{source}: 'imports' must be a list of module ids")
    return ModuleManifest(str(data["id"]), (Path(base_dir) / data["graph"]).resolve(), tuple(imports))


def default_registry_dirs(manifest_path) -> list[Path]:
    env = os.environ.get(MODULE_PATH_ENV)
    if env:
        return [Path(p) for p in env.split(os.pathsep) if p]
    base = Path(manifest_path).resolve().parent
    return [base, base / "modules"]


def load_registry(dirs: Iterable) -> dict[str, ModuleManifest]:
    """Collect manifests from ``*.json`` files; JSON that is not a manifest is skipped."""
    registry: dict[str, ModuleManifest] = {}
    for d in dirs:
        d = Path(d)
        if not d.is_dir():
            continue
        for path in sorted(d.glob("*.json")):
            try:
                with open(path, encoding="utf-8") as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError):
                log.debug("skipping unreadable %s", path)
                continue
            if not (isinstance(data, dict) and "id" in data and "graph" in data):
                continue
            manifest = manifest_from_dict(data, path.parent, source=str(path))
            registry.setdefault(manifest.module_id, manifest)
    return registry


def module_order(root: ModuleManifest, registry: Mapping[str, ModuleManifest]) -> list[ModuleManifest]:
    """Imports before importers, each module once; raises on cycles and missing ids."""
    order: list[ModuleManifest] = []
    done: set[str] = set()
    stack: list[str] = []

    def visit(manifest: ModuleManifest) -> None:
        if manifest.module_id in done:
            return
        if manifest.module_id in stack:
            start = stack.index(manifest.module_id)
            raise ImportCycleError(stack[start:] + [manifest.module_id])
        stack.append(manifest.module_id)
        for dep in manifest.imports:
            target = root if dep == root.module_id else registry.get(dep)
            if target is None:
                raise UnresolvedImportError(dep, manifest.module_id)
            visit(target)
        stack.pop()
        done.add(manifest.module_id)
        order.append(manifest)

    visit(root)
    return order


def resolve_modules(root: ModuleManifest, registry: Mapping[str, ModuleManifest]) -> Graph:
    """Union of the root module graph and everything it imports, frozen."""
    merged = Graph()
    for manifest in module_order(root, registry):
        try:
            g, pm = parse_file(manifest.graph_path)
        except FileNotFoundError:
            raise ModuleError(f"module {manifest.module_id!r}: graph file {manifest.graph_path} not found") from None
        try:
            merged.prefixes.merge(pm)
        except PrefixConflictError as exc:
            raise PrefixConflictError(exc.label, *exc.namespaces) from None
        merged.update(g.triples())
    return merged.freeze()


__all__ = [
    "Schema",
    "IntersectionAxiom",
    "ModuleManifest",
    "extract_schema",
    "subclass_closure",
    "apply_intersection_axioms",
    "resolve_modules",
    "load_manifest",
    "load_registry",
    "default_registry_dirs",
    "module_order",
]
