"""BFS context retrieval against brute-force closures, clearance filtering,
and deterministic context serialization."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medbeads.beads import Bead, Clearance, Role, compute_id, parse_timestamp
from medbeads.errors import DepthOutOfRangeError, NotFoundError
from medbeads.traversal import (
    clearance_filter,
    get_context,
    get_descendants,
    serialize_context,
)

from helpers import (
    MemoryGraph,
    closure_oracle,
    make_draft,
    random_memory_dag,
    subgraph_work,
)

ROLES = sorted(r.value for r in Role)


def chain_graph(n: int = 3) -> tuple[MemoryGraph, list[str]]:
    """A -> B -> C ... (arrows parent -> child), hour-spaced timestamps."""
    graph = MemoryGraph()
    ids: list[str] = []
    for i in range(n):
        draft = make_draft(
            timestamp=f"2026-01-26T{10 + i:02d}:00:00Z",
            content={"step": i},
            parents=(ids[-1],) if ids else (),
        )
        bead = draft.with_id(compute_id(draft))
        graph.add(bead)
        ids.append(bead.id)
    graph.finalize()
    return graph, ids


class TestGetContext:
    def test_direct_parent_only(self):
        graph, (a, b, c) = chain_graph()
        result = get_context(graph, c, depth=1)
        assert result.bead_ids() == [b]
        assert result.truncated is True  # b still has an unvisited parent

    def test_two_hops_in_timestamp_order(self):
        graph, (a, b, c) = chain_graph()
        result = get_context(graph, c, depth=2)
        assert result.bead_ids() == [a, b]
        assert result.truncated is False
        assert result.depth_used == 2

    def test_target_excluded(self):
        graph, (a, b, c) = chain_graph()
        assert c not in get_context(graph, c, depth=5).bead_ids()

    def test_unknown_target(self):
        graph, _ = chain_graph()
        with pytest.raises(NotFoundError):
            get_context(graph, "sha256:" + "0" * 64)

    @pytest.mark.parametrize("depth", [0, -1, 101, "5", 2.5])
    def test_depth_out_of_range(self, depth):
        graph, (_, _, c) = chain_graph()
        with pytest.raises(DepthOutOfRangeError):
            get_context(graph, c, depth=depth)

    def test_edges_restricted_to_result(self):
        graph, (a, b, c) = chain_graph()
        result = get_context(graph, c, depth=1)
        pairs = {(e.child, e.parent) for e in result.edges}
        assert pairs == {(c, b)}  # the a<-b edge is outside the returned set

    def test_monotone_in_depth(self):
        rng = random.Random(3)
        for _ in range(20):
            graph = random_memory_dag(rng, max_nodes=60)
            target = rng.choice(list(graph.beads))
            previous: set[str] = set()
            for depth in range(1, 6):
                current = set(get_context(graph, target, depth).bead_ids())
                assert previous <= current
                previous = current


class TestGetDescendants:
    def test_leaf_has_none(self):
        graph, (_, _, c) = chain_graph()
        result = get_descendants(graph, c, depth=5)
        assert result.bead_ids() == []
        assert result.depth_used == 0

    def test_diamond_dedup(self):
        graph = MemoryGraph()
        a = make_draft(content={"n": "a"}, timestamp="2026-01-26T10:00:00Z")
        a_id = compute_id(a)
        graph.add(a.with_id(a_id))
        b = make_draft(content={"n": "b"}, timestamp="2026-01-26T11:00:00Z", parents=(a_id,))
        c = make_draft(content={"n": "c"}, timestamp="2026-01-26T12:00:00Z", parents=(a_id,))
        b_id, c_id = compute_id(b), compute_id(c)
        graph.add(b.with_id(b_id))
        graph.add(c.with_id(c_id))
        d = make_draft(content={"n": "d"}, timestamp="2026-01-26T13:00:00Z", parents=(b_id, c_id))
        d_id = compute_id(d)
        graph.add(d.with_id(d_id))
        graph.finalize()
        result = get_descendants(graph, a_id, depth=2)
        assert sorted(result.bead_ids()) == sorted([b_id, c_id, d_id])
        assert result.bead_ids().count(d_id) == 1
        assert len(result.edges) == 4

    def test_chain_downward(self):
        graph, (a, b, c) = chain_graph()
        assert get_descendants(graph, a, depth=2).bead_ids() == [b, c]


class TestOracleEquivalence:
    def test_random_dags_both_directions(self):
        rng = random.Random(2026)
        for _ in range(60):
            graph = random_memory_dag(rng, max_nodes=200)
            ids = list(graph.beads)
            for _ in range(3):
                target = rng.choice(ids)
                for depth in (1, 2, 3, 4, 5):
                    for direction, func in (("up", get_context), ("down", get_descendants)):
                        result = func(graph, target, depth)
                        assert set(result.bead_ids()) == closure_oracle(graph, target, depth, direction)

    def test_work_bound_counters(self):
        rng = random.Random(2027)
        for _ in range(40):
            graph = random_memory_dag(rng, max_nodes=120)
            target = rng.choice(list(graph.beads))
            for depth in (1, 3, 5):
                for direction, func in (("up", get_context), ("down", get_descendants)):
                    result = func(graph, target, depth)
                    v_sub, e_sub = subgraph_work(graph, target, depth, direction)
                    assert result.visits <= v_sub
                    assert result.edge_examinations <= e_sub

    def test_unbounded_matches_full_closure(self):
        rng = random.Random(2028)
        graph = random_memory_dag(rng, max_nodes=150)
        for target in rng.sample(list(graph.beads), 10):
            result = get_descendants(graph, target, depth=None)
            assert set(result.bead_ids()) == closure_oracle(graph, target, None, "down")
            assert result.truncated is False


class TestClearanceFilter:
    def _sensitive(self) -> Bead:
        draft = make_draft(clearance=Clearance(denied_roles=("family", "insurance"), reason="sensitive"))
        return draft.with_id(compute_id(draft))

    def test_denied_role_excluded(self):
        assert clearance_filter([self._sensitive()], Role.INSURANCE) == []
        assert clearance_filter([self._sensitive()], "family") == []

    def test_other_roles_included(self):
        bead = self._sensitive()
        assert clearance_filter([bead], Role.SPECIALIST) == [bead]
        assert clearance_filter([bead], Role.EMERGENCY) == [bead]

    def test_no_clearance_always_included(self):
        draft = make_draft()
        bead = draft.with_id(compute_id(draft))
        for role in ROLES:
            assert clearance_filter([bead], role) == [bead]

    def test_preserves_order(self):
        plain = make_draft(content={"n": 1})
        beads = [plain.with_id(compute_id(plain)), self._sensitive()]
        plain2 = make_draft(content={"n": 2})
        beads.append(plain2.with_id(compute_id(plain2)))
        kept = clearance_filter(beads, "patient")
        assert kept == beads  # patient not denied anywhere here

    @settings(max_examples=150, deadline=None)
    @given(
        role=st.sampled_from(ROLES),
        denied_sets=st.lists(
            st.one_of(st.none(), st.lists(st.sampled_from(ROLES), unique=True, max_size=4)),
            max_size=12,
        ),
    )
    def test_filter_soundness(self, role, denied_sets):
        beads = []
        for i, denied in enumerate(denied_sets):
            clearance = Clearance(denied_roles=tuple(denied)) if denied is not None else None
            draft = make_draft(content={"i": i}, clearance=clearance)
            beads.append(draft.with_id(compute_id(draft)))
        for bead in clearance_filter(beads, role):
            assert bead.clearance is None or role not in bead.clearance.denied_roles

    def test_traversal_applies_filter_but_keeps_reachability(self):
        # denied intermediate: its ancestors still appear, it does not
        graph = MemoryGraph()
        a = make_draft(content={"n": "a"}, timestamp="2026-01-26T10:00:00Z")
        a_id = compute_id(a)
        graph.add(a.with_id(a_id))
        mid = make_draft(
            content={"n": "mid"},
            timestamp="2026-01-26T11:00:00Z",
            parents=(a_id,),
            clearance=Clearance(denied_roles=("insurance",)),
        )
        mid_id = compute_id(mid)
        graph.add(mid.with_id(mid_id))
        c = make_draft(content={"n": "c"}, timestamp="2026-01-26T12:00:00Z", parents=(mid_id,))
        c_id = compute_id(c)
        graph.add(c.with_id(c_id))
        graph.finalize()
        result = get_context(graph, c_id, depth=5, role="insurance")
        assert result.bead_ids() == [a_id]


class TestSerializeContext:
    def test_empty_result_is_header_only(self):
        graph, (a, *_rest) = chain_graph()
        result = get_context(graph, a, depth=1)
        text = serialize_context(result)
        assert text == f"# context target={a} depth=0\n"

    def test_deterministic_bytes(self):
        graph, (_, _, c) = chain_graph()
        first = serialize_context(get_context(graph, c, depth=5))
        second = serialize_context(get_context(graph, c, depth=5))
        assert first == second

    def test_blocks_oldest_first_with_fields(self):
        graph, (a, b, c) = chain_graph()
        text = serialize_context(get_context(graph, c, depth=5))
        lines = text.splitlines()
        assert lines[0] == f"# context target={c} depth=2"
        blocks = [i for i, line in enumerate(lines) if line.startswith("## ")]
        assert [lines[i][3:] for i in blocks] == [a, b]
        a_block = lines[blocks[0]: blocks[0] + 5]
        assert a_block[1].startswith("timestamp: 2026-01-26T10:00:00Z")
        assert a_block[2] == "type: medical_note"
        assert a_block[3] == "parents: -"
        assert a_block[4].startswith("content: {")
        b_block = lines[blocks[1]: blocks[1] + 5]
        assert b_block[3] == f"parents: {a}"

    def test_beads_sorted_by_instant_not_text(self):
        graph = MemoryGraph()
        a = make_draft(content={"n": "a"}, timestamp="2026-01-26T10:00:00Z")
        a_id = compute_id(a)
        graph.add(a.with_id(a_id))
        # earlier instant, but lexically later text than the +00:00 form
        b = make_draft(content={"n": "b"}, timestamp="2026-01-26T03:00:00-05:00", parents=(a_id,))
        b_id = compute_id(b)
        graph.add(b.with_id(b_id))
        c = make_draft(content={"n": "c"}, timestamp="2026-01-26T12:00:00Z", parents=(b_id,))
        c_id = compute_id(c)
        graph.add(c.with_id(c_id))
        graph.finalize()
        result = get_context(graph, c_id, depth=5)
        instants = [parse_timestamp(bead.timestamp) for bead in result.beads]
        assert instants == sorted(instants)
        assert result.bead_ids() == [b_id, a_id]
