"""Exception types shared across the engine.

Storage corruption is reported through return values wherever the contract
says so (verify_all); exceptions here cover genuine failure of an operation.
"""

from __future__ import annotations


class MedBeadsError(Exception):
    """Base class for all engine errors."""


class InvalidDraftError(MedBeadsError):
    """A bead draft failed validation. Carries the individual issues."""

    def __init__(self, issues):
        self.issues = list(issues)
        summary = "; ".join(f"{i.code}: {i.message}" for i in self.issues)
        super().__init__(f"invalid bead draft: {summary}")


class NonCanonicalizableNumberError(MedBeadsError):
    """Content contains NaN or an infinity, which has no canonical JSON form."""


class MissingParentError(MedBeadsError):
    def __init__(self, parent_id: str):
        self.parent_id = parent_id
        super().__init__(f"parent not in store: {parent_id}")


class StorageConflictError(MedBeadsError):
    """An object file exists at the target path with non-matching content."""

    def __init__(self, bead_id: str):
        self.bead_id = bead_id
        super().__init__(f"object path for {bead_id} holds conflicting content")


class NotFoundError(MedBeadsError):
    def __init__(self, bead_id: str):
        self.bead_id = bead_id
        super().__init__(f"not found: {bead_id}")


class IntegrityViolationError(MedBeadsError):
    """Stored bytes no longer match the id derived from their path."""

    def __init__(self, expected: str, actual: str, kind: str = "hash_mismatch"):
        self.expected = expected
        self.actual = actual
        self.kind = kind
        super().__init__(f"integrity violation ({kind}): expected {expected}, got {actual}")


class DepthOutOfRangeError(MedBeadsError):
    def __init__(self, depth, max_depth: int):
        self.depth = depth
        self.max_depth = max_depth
        super().__init__(f"depth must be between 1 and {max_depth}, got {depth}")


class MissingSignatureError(MedBeadsError):
    """verify_signature called on a bead that carries no signature."""


class KeyFormatError(MedBeadsError):
    """A signing or verification key could not be decoded."""


class BundleParseError(MedBeadsError):
    """A FHIR bundle file could not be parsed. Carries the offending location."""

    def __init__(self, message: str, path=None):
        self.path = path
        where = f" ({path})" if path else ""
        super().__init__(f"{message}{where}")


class NoPatientError(MedBeadsError):
    """Bundle contains no Patient resource."""


class MultiplePatientsError(MedBeadsError):
    """Bundle contains more than one Patient resource."""
