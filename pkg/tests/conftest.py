from __future__ import annotations

from pathlib import Path

import pytest

from medbeads.engine import Engine
from medbeads.index import GraphIndex
from medbeads.store import BeadStore

FIXTURES_DIR = Path(__file__).parent / "fixtures"

BUNDLE_FILES = [
    FIXTURES_DIR / "bundle_amelia_rivera.json",
    FIXTURES_DIR / "bundle_noah_kimura.json",
    FIXTURES_DIR / "bundle_olivia_brennan.json",
]


@pytest.fixture
def store(tmp_path) -> BeadStore:
    return BeadStore(tmp_path / "data")


@pytest.fixture
def index(tmp_path) -> GraphIndex:
    idx = GraphIndex(tmp_path / "data" / "index.db")
    yield idx
    idx.close()


@pytest.fixture
def engine(tmp_path) -> Engine:
    eng = Engine(tmp_path / "data")
    yield eng
    eng.close()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def ingested_engine(engine) -> Engine:
    """Engine with all three bundle fixtures loaded."""
    for path in BUNDLE_FILES:
        engine.ingest(path)
    return engine


ACCEPTANCE_CRITERIA = {
    "test_hash_identity": "hash identity (standard vectors, cross-process stability)",
    "test_write_once_idempotency": "write-once + idempotency (10,000 puts)",
    "test_tamper_evidence": "tamper evidence (200 DAGs, single-byte corruption)",
    "test_reindex_recoverability": "reindex recoverability (50 stores, byte-identical answers)",
    "test_traversal_oracle_equivalence": "traversal oracle equivalence + work bound (1000 DAGs)",
    "test_fhir_ingestion_integrity": "FHIR ingestion integrity (acyclic, connected, exact counts)",
    "test_clearance_filtering": "clearance filtering (deny-list soundness)",
    "test_api_conformance": "API conformance (five endpoints + error paths)",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    verdicts: dict[str, str] = {}
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if name in ACCEPTANCE_CRITERIA and verdicts.get(name) != "FAIL":
                verdicts[name] = label
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for name, description in ACCEPTANCE_CRITERIA.items():
        if name in verdicts:
            terminalreporter.write_line(f"[{verdicts[name]}] {description}")
