"""Write-once, read-many content-addressable bead storage.

Objects live at ``<data_dir>/objects/<2-hex>/<62-hex>`` (256-way sharding,
one level). The filename is the authority: ids are recomputed on every
read, never trusted from the file body. Files are written atomically via
temp-file-plus-rename in the target directory and are never modified after
creation.

Parents must already exist before a child is written; together with hash
preimage infeasibility this makes cycles impossible by construction.
"""

from __future__ import annotations

import os
import tempfile
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .beads import (
    Bead,
    bead_id_for_bytes,
    canonicalize,
    decode_stored,
    encode_stored,
    is_bead_id,
    validate,
)
from .errors import (
    IntegrityViolationError,
    InvalidDraftError,
    MissingParentError,
    NotFoundError,
    StorageConflictError,
)

OBJECTS_DIR = "objects"


@dataclass(frozen=True)
class ObjectCheck:
    """Per-object verification result."""

    bead_id: str
    ok: bool
    failure: str | None = None  # unreadable | unparseable | hash_mismatch | envelope_mismatch


@dataclass
class VerifyReport:
    """Whole-store verification: corrupted objects plus every bead whose
    ancestry transitively reaches a corrupted or missing object."""

    checked: int = 0
    corrupted: list[tuple[str, str]] = field(default_factory=list)
    broken_descendants: list[str] = field(default_factory=list)

    @property
    def pristine(self) -> bool:
        return not self.corrupted and not self.broken_descendants


class BeadStore:
    """Flat-file CAS over one data directory. Safe to share across threads:
    writes are atomic renames, reads never lock."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.objects_dir = self.data_dir / OBJECTS_DIR
        self.objects_dir.mkdir(parents=True, exist_ok=True)

    def object_path(self, bead_id: str) -> Path:
        if not is_bead_id(bead_id):
            raise ValueError(f"not a bead id: {bead_id!r}")
        digest = bead_id.split(":", 1)[1]
        return self.objects_dir / digest[:2] / digest[2:]

    def exists(self, bead_id: str) -> bool:
        return self.object_path(bead_id).is_file()

    def put(self, draft: Bead) -> str:
        """Persist a draft; returns its derived id. Idempotent: re-putting
        content that is already stored returns the same id and leaves the
        file untouched."""
        issues = validate(draft)
        if issues:
            raise InvalidDraftError(issues)
        for parent in draft.parents:
            if not self.exists(parent):
                raise MissingParentError(parent)
        canonical = canonicalize(draft)
        bead_id = bead_id_for_bytes(canonical)
        path = self.object_path(bead_id)
        if path.is_file():
            try:
                stored = decode_stored(path.read_bytes())
                matches = canonicalize(_strip(stored)) == canonical
            except Exception:
                matches = False
            if matches:
                return bead_id
            raise StorageConflictError(bead_id)
        data = encode_stored(draft.with_id(bead_id))
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, path)  # first rename wins; racing puts of one id converge
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return bead_id

    def get(self, bead_id: str) -> Bead:
        """Load a bead, recomputing its hash. The returned bead's id is the
        recomputed one; tampered bytes raise instead of being served."""
        path = self.object_path(bead_id)
        if not path.is_file():
            raise NotFoundError(bead_id)
        check, bead = self._check_object(bead_id, path)
        if not check.ok:
            actual = bead.id if bead is not None and bead.id else f"<{check.failure}>"
            raise IntegrityViolationError(expected=bead_id, actual=actual, kind=check.failure or "corrupt")
        assert bead is not None
        return bead

    def _check_object(self, bead_id: str, path: Path) -> tuple[ObjectCheck, Bead | None]:
        """Full integrity check of one object file.

        Three layers: the canonical hash must reproduce the path-derived id,
        the embedded id must agree, and the file bytes must equal the
        deterministic re-encoding of their parse. The last check is what
        catches mutations to redundant fields (the stored id, a signature)
        that leave the canonical hash intact.
        """
        try:
            data = path.read_bytes()
        except OSError:
            return ObjectCheck(bead_id, ok=False, failure="unreadable"), None
        try:
            bead = decode_stored(data)
            canonical = canonicalize(_strip(bead))
        except Exception:
            return ObjectCheck(bead_id, ok=False, failure="unparseable"), None
        actual = bead_id_for_bytes(canonical)
        if actual != bead_id:
            return ObjectCheck(bead_id, ok=False, failure="hash_mismatch"), bead.with_id(actual)
        if bead.id != bead_id or encode_stored(bead) != data:
            return ObjectCheck(bead_id, ok=False, failure="envelope_mismatch"), bead.with_id(actual)
        return ObjectCheck(bead_id, ok=True), bead.with_id(actual)

    def verify_object(self, bead_id: str) -> ObjectCheck:
        path = self.object_path(bead_id)
        if not path.is_file():
            raise NotFoundError(bead_id)
        check, _ = self._check_object(bead_id, path)
        return check

    def list_object_ids(self) -> Iterator[str]:
        """Yield every stored id exactly once, reassembled from filenames."""
        if not self.objects_dir.is_dir():
            return
        for prefix_dir in sorted(self.objects_dir.iterdir()):
            if not prefix_dir.is_dir() or len(prefix_dir.name) != 2:
                continue
            for obj in sorted(prefix_dir.iterdir()):
                if obj.name.startswith("."):
                    continue
                candidate = f"sha256:{prefix_dir.name}{obj.name}"
                if is_bead_id(candidate):
                    yield candidate

    def verify_all(self) -> VerifyReport:
        """Re-hash every object, then trace corruption downstream: a bead is
        a broken descendant when its ancestor chain (via parents) reaches a
        corrupted or missing object."""
        report = VerifyReport()
        healthy: dict[str, Bead] = {}
        bad: set[str] = set()
        for bead_id in self.list_object_ids():
            report.checked += 1
            check, bead = self._check_object(bead_id, self.object_path(bead_id))
            if check.ok and bead is not None:
                healthy[bead_id] = bead
            else:
                report.corrupted.append((bead_id, check.failure or "corrupt"))
                bad.add(bead_id)
        # Parents referenced by healthy beads but absent from the store
        # break the chain exactly like corrupted ones.
        for bead in healthy.values():
            for parent in bead.parents:
                if parent not in healthy and parent not in bad:
                    bad.add(parent)
        children: dict[str, list[str]] = {}
        for bead_id, bead in healthy.items():
            for parent in bead.parents:
                children.setdefault(parent, []).append(bead_id)
        broken: set[str] = set()
        queue = deque(bad)
        while queue:
            node = queue.popleft()
            for child in children.get(node, ()):
                if child not in broken:
                    broken.add(child)
                    queue.append(child)
        report.corrupted.sort()
        report.broken_descendants = sorted(broken)
        return report


def _strip(bead: Bead) -> Bead:
    """Draft view of a stored bead: id and signature removed."""
    return Bead(
        type=bead.type,
        timestamp=bead.timestamp,
        author=bead.author,
        parents=bead.parents,
        content=bead.content,
        evidence=bead.evidence,
        clearance=bead.clearance,
    )
