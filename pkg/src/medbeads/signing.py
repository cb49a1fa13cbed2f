"""Detached Ed25519 signatures over canonical bead bytes.

The signature binds exactly the bytes the content hash covers, so hashing
and signing commute: signing never changes the id, and any byte that would
change the id also falsifies the signature.

Key distribution is out of scope; authors are DID strings resolved against
a local keyring file mapping DID -> base64 raw Ed25519 keys.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .beads import Bead, canonicalize
from .errors import KeyFormatError, MissingSignatureError


def generate_keypair() -> tuple[str, str]:
    """Return (private, public) as base64-encoded raw 32-byte Ed25519 keys."""
    private = Ed25519PrivateKey.generate()
    priv_raw = private.private_bytes_raw()
    pub_raw = private.public_key().public_bytes_raw()
    return base64.b64encode(priv_raw).decode(), base64.b64encode(pub_raw).decode()


def _decode_key(encoded: str, expected_len: int = 32) -> bytes:
    try:
        raw = base64.b64decode(encoded, validate=True)
    except Exception as exc:
        raise KeyFormatError(f"key is not valid base64: {exc}") from exc
    if len(raw) != expected_len:
        raise KeyFormatError(f"expected {expected_len} raw key bytes, got {len(raw)}")
    return raw


def sign(draft: Bead, private_key: str) -> str:
    """Base64 detached signature over the draft's canonical bytes."""
    key = Ed25519PrivateKey.from_private_bytes(_decode_key(private_key))
    return base64.b64encode(key.sign(canonicalize(draft))).decode()


def verify_signature(bead: Bead, public_key: str) -> bool:
    """True iff the bead's signature validates over its canonical bytes."""
    if bead.signature is None:
        raise MissingSignatureError("bead carries no signature")
    key = Ed25519PublicKey.from_public_bytes(_decode_key(public_key))
    try:
        raw_sig = base64.b64decode(bead.signature, validate=True)
    except Exception:
        return False
    try:
        key.verify(raw_sig, canonicalize(bead))
        return True
    except InvalidSignature:
        return False


class Keyring:
    """Local DID -> key file, the stand-in for DID network resolution.

    File format: ``{"did:...": {"public": "<b64>", "private": "<b64>"}}``
    where ``private`` is present only for identities this host signs as.
    """

    def __init__(self, entries: dict[str, dict] | None = None):
        self._entries: dict[str, dict] = dict(entries or {})

    @classmethod
    def load(cls, path: str | Path) -> "Keyring":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self._entries, indent=2, sort_keys=True), encoding="utf-8")

    def add(self, did: str, public_key: str, private_key: str | None = None) -> None:
        entry: dict = {"public": public_key}
        if private_key is not None:
            entry["private"] = private_key
        self._entries[did] = entry

    def public_key(self, did: str) -> str | None:
        entry = self._entries.get(did)
        return entry.get("public") if entry else None

    def private_key(self, did: str) -> str | None:
        entry = self._entries.get(did)
        return entry.get("private") if entry else None

    def sign_as(self, draft: Bead, did: str) -> str:
        private = self.private_key(did)
        if private is None:
            raise KeyFormatError(f"no private key for {did}")
        return sign(draft, private)

    def verify(self, bead: Bead) -> bool:
        """Verify a bead against its author's registered public key."""
        public = self.public_key(bead.author)
        if public is None:
            raise KeyFormatError(f"no public key for {bead.author}")
        return verify_signature(bead, public)
