"""MedBeads: tamper-evident clinical records as a content-addressed DAG."""

from .beads import (
    Bead,
    Clearance,
    Evidence,
    Role,
    bead_id_for_bytes,
    canonicalize,
    compute_id,
    is_bead_id,
    validate,
)
from .engine import Engine
from .errors import MedBeadsError
from .index import Edge, GraphIndex, IndexRecord
from .store import BeadStore, VerifyReport
from .traversal import (
    ContextResult,
    clearance_filter,
    get_context,
    get_descendants,
    serialize_context,
)

__version__ = "0.1.0"

__all__ = [
    "Bead",
    "BeadStore",
    "Clearance",
    "ContextResult",
    "Edge",
    "Engine",
    "Evidence",
    "GraphIndex",
    "IndexRecord",
    "MedBeadsError",
    "Role",
    "VerifyReport",
    "bead_id_for_bytes",
    "canonicalize",
    "clearance_filter",
    "compute_id",
    "get_context",
    "get_descendants",
    "is_bead_id",
    "serialize_context",
    "validate",
]
