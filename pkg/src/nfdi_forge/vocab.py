"""Namespaces and the fixed vocabulary terms the toolkit interprets.

Local names follow NAMES.md at the repository root.
"""

from __future__ import annotations

from .terms import Iri


class Namespace(str):
    """A namespace IRI string; attribute or item access mints an :class:`Iri`."""

    def __getattr__(self, name: str) -> Iri:
        if name.startswith("__"):
            raise AttributeError(name)
        return Iri(str(self) + name)

    def __getitem__(self, name) -> Iri:
        if isinstance(name, (int, slice)):
            return str.__getitem__(self, name)
        return Iri(str(self) + name)


RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
OWL = Namespace("http://www.w3.org/2002/07/owl#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")
OBO = Namespace("http://purl.obolibrary.org/obo/")
IAO = Namespace("http://purl.obolibrary.org/obo/iao.owl#")
OBI = Namespace("http://purl.obolibrary.org/obo/obi.owl#")
SCHEMA = Namespace("http://schema.org/")
NFDICORE = Namespace("https://nfdi.fiz-karlsruhe.de/ontology/")
CTO = Namespace("https://nfdi4culture.de/ontology/")

STANDARD_PREFIXES = {
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "owl": str(OWL),
    "xsd": str(XSD),
}

RDF_TYPE = RDF.type
RDF_FIRST = RDF.first
RDF_REST = RDF.rest
RDF_NIL = RDF.nil
RDFS_SUBCLASSOF = RDFS.subClassOf
RDFS_SUBPROPERTYOF = RDFS.subPropertyOf
RDFS_DOMAIN = RDFS.domain
RDFS_RANGE = RDFS.range
RDFS_CLASS = RDFS.Class
RDFS_LITERAL = RDFS.Literal
RDF_PROPERTY = RDF.Property
OWL_CLASS = OWL.Class
OWL_EQUIVALENTCLASS = OWL.equivalentClass
OWL_INTERSECTIONOF = OWL.intersectionOf
OWL_DISJOINTWITH = OWL.disjointWith
OWL_OBJECTPROPERTY = OWL.ObjectProperty
OWL_DATATYPEPROPERTY = OWL.DatatypeProperty
OWL_ANNOTATIONPROPERTY = OWL.AnnotationProperty

# BFO / RO identifiers as used by the OBO library.
BFO_CONTINUANT = OBO.BFO_0000002
BFO_OCCURRENT = OBO.BFO_0000003
BFO_INDEPENDENT_CONTINUANT = OBO.BFO_0000004
BFO_PROCESS = OBO.BFO_0000015
BFO_ROLE = OBO.BFO_0000023
HAS_ROLE = OBO.RO_0000087
PARTICIPATES_IN = OBO.RO_0000056
REALIZED_IN = OBO.BFO_0000054

NFDI_RESOURCE = NFDICORE.Resource
