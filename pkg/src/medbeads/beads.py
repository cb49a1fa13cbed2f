"""Bead data model, canonical serialization, content hashing and validation.

A bead is an immutable clinical event: typed, timestamped, authored,
parent-linked, content-bearing, clearance-tagged and optionally signed.
Its identity is the SHA-256 of its canonical JSON form, so identity and
content can never drift apart.

Canonical form rules (all implementations must agree byte-for-byte):
- UTF-8 JSON, object keys sorted by Unicode code point, no whitespace.
- ``id`` and ``signature`` are never part of the canonical form: the id
  cannot be its own preimage, and the signature signs the same bytes the
  hash covers.
- Absent optional fields (``clearance``, empty ``evidence``) are omitted
  entirely, never emitted as null, so there is exactly one encoding.
- Integers carry no decimal point; floats use shortest round-trip form;
  NaN and infinities are rejected.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from .errors import InvalidDraftError, NonCanonicalizableNumberError

BEAD_ID_RE = re.compile(r"^sha256:[0-9a-f]{64}$")

# Genesis bead type anchoring one patient's subgraph.
PATIENT_ROOT_TYPE = "patient_registration"


class Role(str, Enum):
    """The nine viewer roles a clearance deny-list may name."""

    PATIENT = "patient"
    FAMILY = "family"
    PRIMARY_CARE = "primary_care"
    SPECIALIST = "specialist"
    NURSE = "nurse"
    PHARMACIST = "pharmacist"
    INSURANCE = "insurance"
    RESEARCHER = "researcher"
    EMERGENCY = "emergency"


ROLE_VALUES = frozenset(r.value for r in Role)


def is_bead_id(value: Any) -> bool:
    """True iff value is a well-formed bead id (``sha256:`` + 64 lowercase hex)."""
    return isinstance(value, str) and BEAD_ID_RE.match(value) is not None


def parse_timestamp(ts: str) -> datetime:
    """Parse an ISO 8601 instant to an aware datetime.

    Stored timestamps are never rewritten (that would silently change
    hashes), so comparisons always go through this parser. Accepts the
    ``Z`` suffix and 1-9 fractional digits, which Python 3.10's
    ``fromisoformat`` does not.
    """
    if not isinstance(ts, str) or not ts:
        raise ValueError(f"not a timestamp: {ts!r}")
    text = ts.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    # Normalize fractional seconds to the 6 digits fromisoformat accepts.
    m = re.match(r"^(.*T\d{2}:\d{2}:\d{2})\.(\d{1,9})(.*)$", text)
    if m:
        frac = (m.group(2) + "000000")[:6]
        text = f"{m.group(1)}.{frac}{m.group(3)}"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp has no UTC offset: {ts!r}")
    return dt


def timestamp_sort_key(ts: str) -> str:
    """Fixed-width UTC rendering whose lexical order equals instant order."""
    return parse_timestamp(ts).astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass(frozen=True)
class Evidence:
    """Reference to an external binary by URI, media type and content hash."""

    uri: str
    mime_type: str
    hash: str

    def to_dict(self) -> dict:
        return {"uri": self.uri, "mime_type": self.mime_type, "hash": self.hash}

    @classmethod
    def from_dict(cls, d: dict) -> "Evidence":
        return cls(uri=d.get("uri", ""), mime_type=d.get("mime_type", ""), hash=d.get("hash", ""))


@dataclass(frozen=True)
class Clearance:
    """Embedded role deny-list. Roles kept as raw strings so a stored bead
    round-trips byte-exactly; validity is checked by :func:`validate`."""

    denied_roles: tuple[str, ...]
    reason: str | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"denied_roles": list(self.denied_roles)}
        if self.reason is not None:
            d["reason"] = self.reason
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Clearance":
        return cls(denied_roles=tuple(d.get("denied_roles", ())), reason=d.get("reason"))

    def denies(self, role: str | Role) -> bool:
        value = role.value if isinstance(role, Role) else role
        return value in self.denied_roles


@dataclass(frozen=True)
class Bead:
    """One clinical event node. ``id`` and ``signature`` are None on drafts;
    ``id`` is always derived, never trusted from input."""

    type: str
    timestamp: str
    author: str
    parents: tuple[str, ...] = ()
    content: dict = field(default_factory=dict)
    evidence: tuple[Evidence, ...] = ()
    clearance: Clearance | None = None
    signature: str | None = None
    id: str | None = None

    def is_root(self) -> bool:
        return not self.parents

    def with_id(self, bead_id: str) -> "Bead":
        return Bead(
            type=self.type,
            timestamp=self.timestamp,
            author=self.author,
            parents=self.parents,
            content=self.content,
            evidence=self.evidence,
            clearance=self.clearance,
            signature=self.signature,
            id=bead_id,
        )

    def with_signature(self, signature: str) -> "Bead":
        return Bead(
            type=self.type,
            timestamp=self.timestamp,
            author=self.author,
            parents=self.parents,
            content=self.content,
            evidence=self.evidence,
            clearance=self.clearance,
            signature=signature,
            id=self.id,
        )

    def to_dict(self, include_id: bool = True) -> dict:
        """Wire/on-disk JSON shape. Optional-or-empty fields are omitted."""
        d: dict[str, Any] = {
            "type": self.type,
            "timestamp": self.timestamp,
            "author": self.author,
            "parents": list(self.parents),
            "content": self.content,
        }
        if self.evidence:
            d["evidence"] = [e.to_dict() for e in self.evidence]
        if self.clearance is not None:
            d["clearance"] = self.clearance.to_dict()
        if self.signature is not None:
            d["signature"] = self.signature
        if include_id and self.id is not None:
            d["id"] = self.id
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Bead":
        evidence = tuple(Evidence.from_dict(e) for e in d.get("evidence", ()))
        clearance_raw = d.get("clearance")
        clearance = Clearance.from_dict(clearance_raw) if clearance_raw is not None else None
        return cls(
            type=d.get("type", ""),
            timestamp=d.get("timestamp", ""),
            author=d.get("author", ""),
            parents=tuple(d.get("parents", ())),
            content=d.get("content", {}),
            evidence=evidence,
            clearance=clearance,
            signature=d.get("signature"),
            id=d.get("id"),
        )


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str


def _check_content_tree(value: Any, path: str, issues: list[ValidationIssue]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            if not isinstance(k, str):
                issues.append(ValidationIssue("non_string_key", f"{path}: map key {k!r} is not a string"))
            else:
                _check_content_tree(v, f"{path}.{k}", issues)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _check_content_tree(v, f"{path}[{i}]", issues)
    elif isinstance(value, float):
        if not math.isfinite(value):
            issues.append(ValidationIssue("non_finite_number", f"{path}: {value!r} has no canonical form"))
    elif value is not None and not isinstance(value, (str, int, bool)):
        issues.append(ValidationIssue("unserializable_content", f"{path}: {type(value).__name__} is not JSON data"))


def validate(draft: Bead) -> list[ValidationIssue]:
    """Return one issue per violated bead invariant; empty list if well formed."""
    issues: list[ValidationIssue] = []
    if not draft.type:
        issues.append(ValidationIssue("missing_type", "type must be a non-empty string"))
    elif not isinstance(draft.type, str):
        issues.append(ValidationIssue("missing_type", "type must be a string"))
    try:
        parse_timestamp(draft.timestamp)
    except ValueError as exc:
        issues.append(ValidationIssue("bad_timestamp", str(exc)))
    if not draft.author or not isinstance(draft.author, str):
        issues.append(ValidationIssue("missing_author", "author must be a non-empty string"))
    seen: set[str] = set()
    for p in draft.parents:
        if not is_bead_id(p):
            issues.append(ValidationIssue("bad_parent_id", f"not a bead id: {p!r}"))
        elif p in seen:
            issues.append(ValidationIssue("duplicate_parent", f"parent listed twice: {p}"))
        else:
            seen.add(p)
    if draft.id is not None and draft.id in seen:
        issues.append(ValidationIssue("self_parent", "a bead cannot list itself among its parents"))
    if not isinstance(draft.content, dict):
        issues.append(ValidationIssue("bad_content", "content must be a JSON object"))
    else:
        _check_content_tree(draft.content, "content", issues)
    for i, ev in enumerate(draft.evidence):
        if not ev.uri:
            issues.append(ValidationIssue("bad_evidence", f"evidence[{i}]: uri is empty"))
        if not is_bead_id(ev.hash):
            issues.append(ValidationIssue("bad_evidence", f"evidence[{i}]: hash is not a sha256 digest"))
    if draft.clearance is not None:
        seen_roles: set[str] = set()
        for r in draft.clearance.denied_roles:
            if r not in ROLE_VALUES:
                issues.append(ValidationIssue("invalid_role", f"unknown role in deny-list: {r!r}"))
            elif r in seen_roles:
                issues.append(ValidationIssue("duplicate_role", f"role listed twice: {r}"))
            else:
                seen_roles.add(r)
    return issues


def canonical_json_bytes(obj: Any) -> bytes:
    """Canonical JSON encoding of a plain data tree (the single source of
    truth for every hash in the system)."""
    try:
        text = json.dumps(
            obj,
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=False,
            allow_nan=False,
        )
    except ValueError as exc:
        raise NonCanonicalizableNumberError(str(exc)) from exc
    return text.encode("utf-8")


def canonicalize(draft: Bead) -> bytes:
    """Deterministic canonical bytes of a draft, excluding id and signature."""
    issues = validate(draft)
    if issues:
        raise InvalidDraftError(issues)
    body = draft.to_dict(include_id=False)
    body.pop("signature", None)
    return canonical_json_bytes(body)


def bead_id_for_bytes(data: bytes) -> str:
    """``sha256:`` + lowercase hex SHA-256 of the given bytes."""
    return "sha256:" + hashlib.sha256(data).hexdigest()


def compute_id(draft: Bead) -> str:
    """Content hash identity of a draft: SHA-256 over its canonical form."""
    return bead_id_for_bytes(canonicalize(draft))


def encode_stored(bead: Bead) -> bytes:
    """On-disk encoding: the full bead including derived id and signature,
    in the same compact sorted-key form the hash uses. Deterministic, so a
    stored file is byte-reproducible from its parsed value."""
    if bead.id is None:
        raise ValueError("stored encoding requires a derived id")
    return canonical_json_bytes(bead.to_dict(include_id=True))


def decode_stored(data: bytes) -> Bead:
    """Parse an on-disk object file back into a Bead."""
    return Bead.from_dict(json.loads(data.decode("utf-8")))
