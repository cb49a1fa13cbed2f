"""Shared test utilities: random draft/DAG generation and brute-force oracles.

Oracles here are deliberately independent of the code under test: the
closure oracle is plain recursion over in-memory parent lists, and the
canonical-JSON reference serializer assembles tokens by hand.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field

from medbeads.beads import Bead, Clearance, Evidence, Role, bead_id_for_bytes

ROLES = sorted(r.value for r in Role)


def make_draft(**overrides) -> Bead:
    base = dict(
        type="medical_note",
        timestamp="2026-01-26T10:00:00Z",
        author="did:medbeads:doctor:12345",
        parents=(),
        content={"summary": "Patient presents with dyspnea.",
                 "structured": {"diagnosis": "Pneumonia", "icd10": "J18.9"}},
    )
    base.update(overrides)
    return Bead(**base)


def fake_bead_id(rng: random.Random) -> str:
    return bead_id_for_bytes(rng.randbytes(16))


def random_scalar(rng: random.Random):
    kind = rng.randrange(6)
    if kind == 0:
        return rng.randint(-10**9, 10**9)
    if kind == 1:
        return round(rng.uniform(-1e6, 1e6), rng.randint(0, 8))
    if kind == 2:
        return rng.choice([True, False])
    if kind == 3:
        return None
    if kind == 4:
        alphabet = string.ascii_letters + string.digits + " _-–é漢\"\\\n"
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
    return rng.choice(["mmol/L", "final", "active", "右肺", "naïve"])


def random_tree(rng: random.Random, depth: int = 3):
    if depth <= 0 or rng.random() < 0.4:
        return random_scalar(rng)
    if rng.random() < 0.5:
        return {f"k{rng.randint(0, 20)}_{i}": random_tree(rng, depth - 1) for i in range(rng.randint(0, 4))}
    return [random_tree(rng, depth - 1) for _ in range(rng.randint(0, 4))]


def random_draft(rng: random.Random, parents: tuple[str, ...] = ()) -> Bead:
    evidence = ()
    if rng.random() < 0.2:
        evidence = (
            Evidence(
                uri=f"s3://pacs/{rng.randint(0, 10**6)}.dcm",
                mime_type="application/dicom",
                hash=fake_bead_id(rng),
            ),
        )
    clearance = None
    if rng.random() < 0.3:
        denied = tuple(sorted(rng.sample(ROLES, rng.randint(1, 3))))
        clearance = Clearance(denied_roles=denied, reason=rng.choice([None, "sensitive"]))
    second = rng.randint(0, 59)
    return Bead(
        type=rng.choice(["medical_note", "fhir_observation", "fhir_condition", "reasoning"]),
        timestamp=f"2026-01-{rng.randint(1, 28):02d}T{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:{second:02d}Z",
        author=f"did:medbeads:doctor:{rng.randint(1, 99999)}",
        parents=parents,
        content={"note": random_tree(rng), "n": rng.randint(0, 10**6)},
        evidence=evidence,
        clearance=clearance,
    )


@dataclass
class MemoryGraph:
    """In-memory graph access double with the traversal duck interface."""

    beads: dict[str, Bead] = field(default_factory=dict)
    children: dict[str, list[str]] = field(default_factory=dict)

    def add(self, bead: Bead) -> None:
        assert bead.id is not None
        self.beads[bead.id] = bead
        self.children.setdefault(bead.id, [])
        for p in bead.parents:
            self.children.setdefault(p, []).append(bead.id)

    def finalize(self) -> None:
        from medbeads.beads import parse_timestamp

        for kids in self.children.values():
            kids.sort(key=lambda i: (parse_timestamp(self.beads[i].timestamp), i))

    def has(self, bead_id: str) -> bool:
        return bead_id in self.beads

    def parents_of(self, bead_id: str) -> list[str]:
        return list(self.beads[bead_id].parents)

    def children_of(self, bead_id: str) -> list[str]:
        return list(self.children.get(bead_id, ()))

    def load(self, bead_id: str) -> Bead:
        return self.beads[bead_id]


def random_memory_dag(rng: random.Random, max_nodes: int = 200) -> MemoryGraph:
    """Random DAG built child-after-parent, ids content-derived."""
    from medbeads.beads import compute_id

    graph = MemoryGraph()
    ids: list[str] = []
    n = rng.randint(2, max_nodes)
    for i in range(n):
        if i == 0 or rng.random() < 0.08:
            parents: tuple[str, ...] = ()
        else:
            k = min(len(ids), rng.choice([1, 1, 1, 2, 2, 3]))
            parents = tuple(dict.fromkeys(rng.sample(ids, k)))
        draft = random_draft(rng, parents=parents)
        bead = draft.with_id(compute_id(draft))
        graph.add(bead)
        ids.append(bead.id)
    graph.finalize()
    return graph


def closure_oracle(graph: MemoryGraph, target: str, depth: int | None, direction: str) -> set[str]:
    """Brute-force depth-bounded closure by naive recursion (no queue, no
    visited-order logic shared with the implementation). A node is
    re-descended whenever it is reached with a larger remaining budget, so
    shorter paths extend the reach correctly."""
    neighbors = (
        (lambda i: list(graph.beads[i].parents)) if direction == "up" else (lambda i: graph.children_of(i))
    )
    limit = depth if depth is not None else len(graph.beads)
    found: set[str] = set()
    best_budget: dict[str, int] = {}

    def walk(node: str, remaining: int) -> None:
        if best_budget.get(node, -1) >= remaining:
            return
        best_budget[node] = remaining
        if remaining <= 0:
            return
        for n in neighbors(node):
            found.add(n)
            walk(n, remaining - 1)

    walk(target, limit)
    found.discard(target)
    return found


def subgraph_work(graph: MemoryGraph, target: str, depth: int | None, direction: str) -> tuple[int, int]:
    """(V, E) of the depth-bounded subgraph: nodes in closure plus target,
    and the out-degree sum over those nodes in traversal direction."""
    nodes = closure_oracle(graph, target, depth, direction) | {target}
    neighbors = (
        (lambda i: list(graph.beads[i].parents)) if direction == "up" else (lambda i: graph.children_of(i))
    )
    edges = sum(len(neighbors(n)) for n in nodes)
    return len(nodes), edges


def build_store_dag(rng: random.Random, store, n_nodes: int, index=None) -> list[str]:
    """Write a random DAG through a real store (and index, if given)."""
    ids: list[str] = []
    for i in range(n_nodes):
        if i == 0 or rng.random() < 0.1:
            parents: tuple[str, ...] = ()
        else:
            k = min(len(ids), rng.choice([1, 1, 2, 2, 3]))
            parents = tuple(dict.fromkeys(rng.sample(ids, k)))
        draft = random_draft(rng, parents=parents)
        bead_id = store.put(draft)
        if index is not None:
            index.index_bead(draft.with_id(bead_id))
        ids.append(bead_id)
    return ids


def reference_canonical_json(value) -> str:
    """Independent canonical JSON serializer assembled token by token."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(reference_canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = []
        for key in sorted(value.keys()):
            parts.append(json.dumps(key, ensure_ascii=False) + ":" + reference_canonical_json(value[key]))
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"not JSON data: {value!r}")
