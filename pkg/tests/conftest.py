from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

from nfdi_forge.ontology import default_registry_dirs, extract_schema, load_registry, resolve_modules  # noqa: E402
from nfdi_forge.rules import parse_rules_file  # noqa: E402
from nfdi_forge.turtle import parse_file  # noqa: E402

FIXTURES = ROOT / "fixtures"
RULES = ROOT / "rules" / "shortcuts.rules"
CORE_MANIFEST = FIXTURES / "manifest.json"
CTO_MANIFEST = FIXTURES / "modules" / "cto.json"


def load_ontology(module_id: str = "cto"):
    registry = load_registry(default_registry_dirs(CORE_MANIFEST))
    return resolve_modules(registry[module_id], registry)


def data_with_ontology(path, ontology):
    g, pm = parse_file(path)
    merged = g | ontology
    return merged.freeze(), pm


@pytest.fixture(scope="session")
def ontology():
    return load_ontology("cto")


@pytest.fixture(scope="session")
def core_ontology():
    return load_ontology("nfdicore")


@pytest.fixture(scope="session")
def schema(ontology):
    return extract_schema(ontology)


@pytest.fixture(scope="session")
def rules():
    return parse_rules_file(RULES)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
