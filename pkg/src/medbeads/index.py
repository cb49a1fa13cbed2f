"""Ephemeral metadata index over the CAS: edge lookups and type queries.

The index is a cache, never the truth. It lives in a single SQLite file
beside the objects directory and can be deleted at any time; ``reindex``
reconstructs it completely from the stored objects. Timestamps keep their
original text but are additionally stored as a fixed-width UTC sort key so
SQL ordering matches instant order across mixed offsets and precisions.
"""

from __future__ import annotations

import sqlite3
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .beads import PATIENT_ROOT_TYPE, Bead, timestamp_sort_key
from .errors import NotFoundError
from .store import BeadStore

INDEX_FILENAME = "index.db"

_SCHEMA = """
CREATE TABLE IF NOT EXISTS beads (
    id        TEXT PRIMARY KEY,
    type      TEXT NOT NULL,
    timestamp TEXT NOT NULL,
    ts_sort   TEXT NOT NULL,
    author    TEXT NOT NULL,
    is_root   INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS bead_edges (
    child    TEXT NOT NULL,
    parent   TEXT NOT NULL,
    position INTEGER NOT NULL,
    PRIMARY KEY (child, position)
);
CREATE INDEX IF NOT EXISTS idx_edges_parent ON bead_edges (parent);
CREATE INDEX IF NOT EXISTS idx_beads_type ON beads (type);
"""


@dataclass(frozen=True)
class IndexRecord:
    id: str
    type: str
    timestamp: str
    author: str
    is_root: bool


@dataclass(frozen=True)
class Edge:
    child: str
    parent: str


@dataclass(frozen=True)
class ReindexStats:
    objects_scanned: int
    records_written: int
    edges_written: int
    skipped_corrupted: int
    duration_seconds: float


class GraphIndex:
    """SQLite-backed edge/metadata index, shareable across threads."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.execute("PRAGMA journal_mode=WAL")
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)

    @classmethod
    def for_data_dir(cls, data_dir: str | Path) -> "GraphIndex":
        return cls(Path(data_dir) / INDEX_FILENAME)

    def close(self) -> None:
        self._conn.close()

    def index_bead(self, bead: Bead) -> None:
        """Record a stored bead and its child->parent edges. Idempotent."""
        if bead.id is None:
            raise ValueError("cannot index a bead without an id")
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO beads (id, type, timestamp, ts_sort, author, is_root)"
                " VALUES (?, ?, ?, ?, ?, ?)",
                (
                    bead.id,
                    bead.type,
                    bead.timestamp,
                    timestamp_sort_key(bead.timestamp),
                    bead.author,
                    int(bead.is_root()),
                ),
            )
            self._conn.execute("DELETE FROM bead_edges WHERE child = ?", (bead.id,))
            self._conn.executemany(
                "INSERT INTO bead_edges (child, parent, position) VALUES (?, ?, ?)",
                [(bead.id, parent, pos) for pos, parent in enumerate(bead.parents)],
            )

    def has(self, bead_id: str) -> bool:
        with self._lock:
            row = self._conn.execute("SELECT 1 FROM beads WHERE id = ?", (bead_id,)).fetchone()
        return row is not None

    def record(self, bead_id: str) -> IndexRecord:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, type, timestamp, author, is_root FROM beads WHERE id = ?", (bead_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError(bead_id)
        return IndexRecord(id=row[0], type=row[1], timestamp=row[2], author=row[3], is_root=bool(row[4]))

    def parents_of(self, bead_id: str) -> list[str]:
        """The bead's parents in stored order."""
        if not self.has(bead_id):
            raise NotFoundError(bead_id)
        with self._lock:
            rows = self._conn.execute(
                "SELECT parent FROM bead_edges WHERE child = ? ORDER BY position", (bead_id,)
            ).fetchall()
        return [r[0] for r in rows]

    def children_of(self, bead_id: str) -> list[str]:
        """All beads listing this id as a parent, ordered (timestamp, id)."""
        if not self.has(bead_id):
            raise NotFoundError(bead_id)
        with self._lock:
            rows = self._conn.execute(
                "SELECT e.child FROM bead_edges e JOIN beads b ON b.id = e.child"
                " WHERE e.parent = ? ORDER BY b.ts_sort, b.id",
                (bead_id,),
            ).fetchall()
        return [r[0] for r in rows]

    def patient_roots(self) -> list[IndexRecord]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, type, timestamp, author, is_root FROM beads"
                " WHERE type = ? ORDER BY ts_sort, id",
                (PATIENT_ROOT_TYPE,),
            ).fetchall()
        return [
            IndexRecord(id=r[0], type=r[1], timestamp=r[2], author=r[3], is_root=bool(r[4]))
            for r in rows
        ]

    def count(self) -> int:
        with self._lock:
            return self._conn.execute("SELECT COUNT(*) FROM beads").fetchone()[0]

    def all_ids(self) -> list[str]:
        with self._lock:
            return [r[0] for r in self._conn.execute("SELECT id FROM beads ORDER BY id").fetchall()]

    def reindex(self, store: BeadStore) -> ReindexStats:
        """Drop all index state and rebuild it by scanning the CAS.

        Corrupted objects are skipped and counted, not fatal: recoverability
        is the point of this operation.
        """
        started = time.monotonic()
        scanned = 0
        skipped = 0
        rows: list[tuple] = []
        edges: list[tuple] = []
        for bead_id in store.list_object_ids():
            scanned += 1
            try:
                bead = store.get(bead_id)
            except Exception:
                skipped += 1
                continue
            rows.append(
                (
                    bead.id,
                    bead.type,
                    bead.timestamp,
                    timestamp_sort_key(bead.timestamp),
                    bead.author,
                    int(bead.is_root()),
                )
            )
            edges.extend((bead.id, parent, pos) for pos, parent in enumerate(bead.parents))
        with self._lock, self._conn:
            self._conn.execute("DELETE FROM beads")
            self._conn.execute("DELETE FROM bead_edges")
            self._conn.executemany(
                "INSERT INTO beads (id, type, timestamp, ts_sort, author, is_root)"
                " VALUES (?, ?, ?, ?, ?, ?)",
                rows,
            )
            self._conn.executemany(
                "INSERT INTO bead_edges (child, parent, position) VALUES (?, ?, ?)", edges
            )
        return ReindexStats(
            objects_scanned=scanned,
            records_written=len(rows),
            edges_written=len(edges),
            skipped_corrupted=skipped,
            duration_seconds=time.monotonic() - started,
        )
