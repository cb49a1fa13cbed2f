"""One handle over a data directory: store, index and traversal wired up.

The API service and the CLI are thin wrappers over this class, so their
observable behaviour is the library behaviour by construction.
"""

from __future__ import annotations

import os
from pathlib import Path

from .beads import PATIENT_ROOT_TYPE, Bead, compute_id
from .errors import NotFoundError
from .fhir import ConversionStats, convert_bundle, load_bundle
from .index import GraphIndex, ReindexStats
from .store import BeadStore, VerifyReport
from .traversal import (
    DEFAULT_DEPTH,
    MAX_DEPTH,
    ContextResult,
    StoreGraph,
    clearance_filter,
    edges_for,
    get_context,
    get_descendants,
    sorted_beads,
)

DATA_DIR_ENV = "MEDBEADS_DATA_DIR"
ADDR_ENV = "MEDBEADS_ADDR"
DEFAULT_ADDR = "127.0.0.1:8080"


def resolve_data_dir(flag_value: str | None = None) -> Path:
    """CLI flag wins, then the environment, then ./medbeads_data."""
    if flag_value:
        return Path(flag_value)
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else Path("medbeads_data")


class Engine:
    def __init__(self, data_dir: str | Path, depth_default: int = DEFAULT_DEPTH,
                 max_depth: int = MAX_DEPTH):
        self.data_dir = Path(data_dir)
        self.store = BeadStore(self.data_dir)
        self.index = GraphIndex.for_data_dir(self.data_dir)
        self.graph = StoreGraph(self.store, self.index)
        self.depth_default = depth_default
        self.max_depth = max_depth

    def close(self) -> None:
        self.index.close()

    def put_bead(self, draft: Bead) -> tuple[str, bool]:
        """Persist and index a draft; returns (id, created)."""
        bead_id = compute_id(draft)
        created = not self.store.exists(bead_id)
        self.store.put(draft)
        self.index.index_bead(draft.with_id(bead_id))
        return bead_id, created

    def get_bead(self, bead_id: str) -> Bead:
        return self.store.get(bead_id)

    def context(self, target: str, depth: int | None = None,
                role: str | None = None) -> ContextResult:
        depth = self.depth_default if depth is None else depth
        return get_context(self.graph, target, depth, role, max_depth=self.max_depth)

    def descendants(self, target: str, depth: int | None = None,
                    role: str | None = None) -> ContextResult:
        depth = self.depth_default if depth is None else depth
        return get_descendants(self.graph, target, depth, role, max_depth=self.max_depth)

    def patients(self) -> list[dict]:
        """Patient root summaries for selection lists."""
        out = []
        for record in self.index.patient_roots():
            subgraph = get_descendants(self.graph, record.id, depth=None)
            bead = self.store.get(record.id)
            out.append(
                {
                    "id": record.id,
                    "name": _patient_name(bead),
                    "timestamp": record.timestamp,
                    "bead_count": len(subgraph.beads),
                }
            )
        return out

    def patient_beads(self, root_id: str, include_administrative: bool = False,
                      role: str | None = None) -> tuple[list[Bead], list]:
        """Full subgraph of one patient: root plus every descendant,
        administrative beads excluded unless asked for, clearance-filtered,
        chronologically ordered, with the edge list for graph rendering."""
        try:
            record = self.index.record(root_id)
        except NotFoundError:
            raise
        if record.type != PATIENT_ROOT_TYPE:
            raise NotFoundError(root_id)
        result = get_descendants(self.graph, root_id, depth=None)
        beads = [self.store.get(root_id), *result.beads]
        if not include_administrative:
            beads = [b for b in beads if b.content.get("administrative") is not True]
        if role is not None:
            beads = clearance_filter(beads, role)
        beads = sorted_beads(beads)
        return beads, edges_for(beads)

    def ingest(self, bundle_path: str | Path) -> tuple[str, ConversionStats]:
        bundle = load_bundle(bundle_path)
        return convert_bundle(bundle, self.store, self.index)

    def verify(self) -> VerifyReport:
        return self.store.verify_all()

    def reindex(self) -> ReindexStats:
        return self.index.reindex(self.store)

    def health(self) -> dict:
        object_count = sum(1 for _ in self.store.list_object_ids())
        return {
            "status": "ok",
            "object_count": object_count,
            "index_ok": self.index.count() == object_count,
        }


def _patient_name(bead: Bead) -> str | None:
    names = bead.content.get("fhir", {}).get("name")
    if not isinstance(names, list) or not names:
        return None
    name = names[0]
    if not isinstance(name, dict):
        return None
    given = name.get("given") or []
    family = name.get("family") or ""
    parts = [p for p in [*given, family] if isinstance(p, str) and p]
    return " ".join(parts) or None
