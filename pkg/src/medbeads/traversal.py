"""Deterministic, depth-limited BFS over the bead DAG.

Ancestor retrieval answers "why did this event occur"; descendant
retrieval answers "what happened after it". Both run queue-based BFS with
a visited set, doing work proportional to the depth-bounded subgraph only
(visit and edge counters are kept so that bound stays testable).

Traversal works against any graph access object exposing ``has(id)``,
``parents_of(id)``, ``children_of(id)`` and ``load(id) -> Bead``;
:class:`StoreGraph` adapts the real store plus index.

Clearance filtering happens after traversal, not during: a denied
intermediate bead still transmits reachability to its ancestors, but the
bead itself is withheld. Visibility is controlled, connectivity is not.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .beads import Bead, Role, canonical_json_bytes, parse_timestamp
from .errors import DepthOutOfRangeError, NotFoundError
from .index import Edge, GraphIndex
from .store import BeadStore

DEFAULT_DEPTH = 5
MAX_DEPTH = 100


class StoreGraph:
    """Graph access over the CAS (bead bodies) and the index (edges)."""

    def __init__(self, store: BeadStore, index: GraphIndex):
        self.store = store
        self.index = index

    def has(self, bead_id: str) -> bool:
        return self.index.has(bead_id)

    def parents_of(self, bead_id: str) -> list[str]:
        return self.index.parents_of(bead_id)

    def children_of(self, bead_id: str) -> list[str]:
        return self.index.children_of(bead_id)

    def load(self, bead_id: str) -> Bead:
        return self.store.get(bead_id)


@dataclass
class ContextResult:
    """Ordered subgraph around a target bead.

    ``beads`` excludes the target and is sorted ascending by
    (timestamp instant, id); ``edges`` is restricted to returned beads plus
    the target. ``truncated`` reports that the frontier still had unvisited
    neighbours at the depth limit, i.e. context is incomplete.
    """

    target: str
    beads: list[Bead]
    edges: list[Edge]
    depth_used: int
    truncated: bool
    # instrumentation for the work-bound contract, not part of the wire shape
    visits: int = 0
    edge_examinations: int = 0

    def bead_ids(self) -> list[str]:
        return [b.id for b in self.beads]

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "beads": [b.to_dict() for b in self.beads],
            "edges": [{"child": e.child, "parent": e.parent} for e in self.edges],
            "depth_used": self.depth_used,
            "truncated": self.truncated,
        }


def clearance_filter(beads: Sequence[Bead], role: Role | str) -> list[Bead]:
    """Beads visible to ``role``: clearance absent or role not denied.
    Pure, order-preserving, default-allow."""
    value = role.value if isinstance(role, Role) else role
    return [b for b in beads if b.clearance is None or not b.clearance.denies(value)]


def _check_depth(depth: int | None, max_depth: int) -> None:
    if depth is None:  # unbounded, internal callers only
        return
    if not isinstance(depth, int) or isinstance(depth, bool) or not 1 <= depth <= max_depth:
        raise DepthOutOfRangeError(depth, max_depth)


def _bfs(graph, target: str, depth: int | None, direction: str) -> tuple[list[str], int, bool, int, int]:
    neighbors_of = graph.parents_of if direction == "up" else graph.children_of
    visited = {target}
    collected: list[str] = []
    queue: deque[tuple[str, int]] = deque([(target, 0)])
    visits = 0
    edge_exams = 0
    depth_used = 0
    truncated = False
    while queue:
        node, d = queue.popleft()
        visits += 1
        if depth is not None and d == depth:
            # Frontier at the limit: look only far enough to learn whether
            # unvisited neighbours remain beyond it.
            if not truncated:
                for n in neighbors_of(node):
                    edge_exams += 1
                    if n not in visited:
                        truncated = True
                        break
            continue
        for n in neighbors_of(node):
            edge_exams += 1
            if n not in visited:
                visited.add(n)
                collected.append(n)
                depth_used = max(depth_used, d + 1)
                queue.append((n, d + 1))
    return collected, depth_used, truncated, visits, edge_exams


def sorted_beads(beads: Iterable[Bead]) -> list[Bead]:
    """Chronological order with id as the deterministic tie-break."""
    return sorted(beads, key=lambda b: (parse_timestamp(b.timestamp), b.id))


def edges_for(beads: Sequence[Bead]) -> list[Edge]:
    """Child->parent edges with both endpoints among the given beads."""
    members = {b.id for b in beads}
    edges = []
    for bead in beads:
        for parent in bead.parents:
            if parent in members:
                edges.append(Edge(child=bead.id, parent=parent))
    edges.sort(key=lambda e: (e.child, e.parent))
    return edges


def _traverse(
    graph,
    target: str,
    depth: int | None,
    role: Role | str | None,
    direction: str,
    max_depth: int,
) -> ContextResult:
    _check_depth(depth, max_depth)
    if not graph.has(target):
        raise NotFoundError(target)
    collected, depth_used, truncated, visits, edge_exams = _bfs(graph, target, depth, direction)
    beads = [graph.load(bead_id) for bead_id in collected]
    if role is not None:
        beads = clearance_filter(beads, role)
    beads = sorted_beads(beads)
    target_bead = graph.load(target)
    return ContextResult(
        target=target,
        beads=beads,
        edges=edges_for([target_bead, *beads]),
        depth_used=depth_used,
        truncated=truncated,
        visits=visits,
        edge_examinations=edge_exams,
    )


def get_context(
    graph,
    target: str,
    depth: int | None = DEFAULT_DEPTH,
    role: Role | str | None = None,
    max_depth: int = MAX_DEPTH,
) -> ContextResult:
    """Ancestors of ``target`` within ``depth`` parent hops, target excluded.

    Deterministic: identical inputs over an identical store produce an
    identical result, down to ordering.
    """
    return _traverse(graph, target, depth, role, "up", max_depth)


def get_descendants(
    graph,
    target: str,
    depth: int | None = DEFAULT_DEPTH,
    role: Role | str | None = None,
    max_depth: int = MAX_DEPTH,
) -> ContextResult:
    """Descendants of ``target`` within ``depth`` child hops, target excluded."""
    return _traverse(graph, target, depth, role, "down", max_depth)


def serialize_context(result: ContextResult) -> str:
    """Render a context result as a deterministic plain-text document.

    Grammar (documented in the README): a single header line, then one
    block per bead, oldest first, separated by blank lines. Byte-identical
    output for identical inputs is the reproducibility guarantee consumers
    rely on.
    """
    lines = [f"# context target={result.target} depth={result.depth_used}"]
    for bead in result.beads:
        parents = " ".join(bead.parents) if bead.parents else "-"
        lines.append("")
        lines.append(f"## {bead.id}")
        lines.append(f"timestamp: {bead.timestamp}")
        lines.append(f"type: {bead.type}")
        lines.append(f"parents: {parents}")
        lines.append("content: " + canonical_json_bytes(bead.content).decode("utf-8"))
    return "\n".join(lines) + "\n"
