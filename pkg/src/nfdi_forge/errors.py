"""Exception types raised across the toolkit."""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for every error raised by nfdi_forge."""


class StructuralError(ForgeError):
    """A triple or term violates the RDF data model."""


class FrozenGraphError(ForgeError):
    """Mutation attempted on a frozen graph."""


class UnresolvedPrefixError(ForgeError):
    def __init__(self, label: str):
        super().__init__(f"unresolved prefix {label!r}")
        self.label = label


class ParseError(ForgeError):
    """Turtle / N-Triples syntax error with a 1-based position."""

    KINDS = ("bad-token", "unterminated-literal", "unknown-prefix", "bad-iri", "bad-structure")

    def __init__(self, kind: str, message: str, line: int, column: int):
        if kind not in self.KINDS:
            raise ValueError(f"unknown parse error kind {kind!r}")
        super().__init__(f"{line}:{column}: {kind}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.column = column


class SchemaError(ForgeError):
    """An ontology axiom has a shape the extractor does not accept."""

    def __init__(self, message: str, defined_class=None):
        super().__init__(message)
        self.defined_class = defined_class


class ModuleError(ForgeError):
    pass


class UnresolvedImportError(ModuleError):
    def __init__(self, module_id: str, importer: str | None = None):
        where = f" (imported by {importer!r})" if importer else ""
        super().__init__(f"unresolved import {module_id!r}{where}")
        self.module_id = module_id
        self.importer = importer


class ImportCycleError(ModuleError):
    def __init__(self, cycle: list[str]):
        super().__init__("import cycle: " + " -> ".join(cycle))
        self.cycle = cycle


class PrefixConflictError(ModuleError):
    def __init__(self, label: str, first: str, second: str):
        super().__init__(f"prefix {label!r} bound to both <{first}> and <{second}>")
        self.label = label
        self.namespaces = (first, second)


class RuleSyntaxError(ForgeError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class RuleSafetyError(RuleSyntaxError):
    def __init__(self, rule_id: str, variables: list[str], line: int):
        names = ", ".join("?" + v for v in variables)
        super(RuleSyntaxError, self).__init__(
            f"line {line}: rule {rule_id!r} is unsafe, head variable(s) {names} not bound in body"
        )
        self.line = line
        self.rule_id = rule_id
        self.variables = variables


class QuerySyntaxError(ForgeError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnsupportedFeatureError(QuerySyntaxError):
    def __init__(self, keyword: str, line: int, column: int):
        super().__init__(f"unsupported feature {keyword}", line, column)
        self.keyword = keyword


class SuiteError(ForgeError):
    """A competency-question suite document is malformed."""

    def __init__(self, message: str, case_id: str | None = None):
        super().__init__(f"case {case_id!r}: {message}" if case_id else message)
        self.case_id = case_id
