"""FHIR bundle loading, per-resource mapping, and whole-bundle conversion."""

from __future__ import annotations

import json
from graphlib import TopologicalSorter

import pytest

from medbeads.beads import PATIENT_ROOT_TYPE
from medbeads.errors import BundleParseError, MultiplePatientsError, NoPatientError
from medbeads.fhir import (
    BRIDGE_AUTHOR,
    FhirEntry,
    RefMap,
    _Conversion,
    convert_bundle,
    load_bundle,
    map_resource,
)
from medbeads.traversal import StoreGraph, get_descendants


class TestLoadBundle:
    def test_entry_count_matches_file(self, fixtures_dir):
        path = fixtures_dir / "bundle_amelia_rivera.json"
        bundle = load_bundle(path)
        raw = json.loads(path.read_text())  # independent recount
        assert len(bundle.entries) == len(raw["entry"])

    def test_entries_keep_file_order(self, fixtures_dir):
        bundle = load_bundle(fixtures_dir / "bundle_amelia_rivera.json")
        assert bundle.entries[0].resource["resourceType"] == "Patient"

    def test_empty_bundle(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"resourceType": "Bundle", "type": "transaction", "entry": []}')
        assert load_bundle(path).entries == ()

    def test_malformed_file(self, fixtures_dir):
        with pytest.raises(BundleParseError) as exc:
            load_bundle(fixtures_dir / "malformed.json")
        assert "line" in str(exc.value)

    def test_not_a_bundle(self, tmp_path):
        path = tmp_path / "not_bundle.json"
        path.write_text('{"resourceType": "Patient"}')
        with pytest.raises(BundleParseError):
            load_bundle(path)


def _ctx_with_root(root_id="sha256:" + "a" * 64, root_ts="1987-04-12T00:00:00Z") -> _Conversion:
    ctx = _Conversion(ref_map=RefMap())
    ctx.root_id = root_id
    ctx.root_timestamp = root_ts
    return ctx


def _entry(resource: dict, url: str = "urn:uuid:res-1") -> FhirEntry:
    return FhirEntry(full_url=url, resource={"id": url.split(":")[-1], **resource})


class TestMapResource:
    def test_condition_fields_and_parent(self):
        ctx = _ctx_with_root()
        enc_id = "sha256:" + "b" * 64
        ctx.ref_map._map["urn:uuid:enc-1"] = enc_id
        ctx.encounter_starts[enc_id] = "2026-01-20T09:00:00Z"
        entry = _entry(
            {
                "resourceType": "Condition",
                "code": {"text": "Pneumonia"},
                "clinicalStatus": {"coding": [{"code": "active"}]},
                "encounter": {"reference": "urn:uuid:enc-1"},
                "onsetDateTime": "2026-01-20T09:30:00Z",
            }
        )
        mapped = map_resource(entry, ctx)
        assert mapped.kind == "converted"
        draft = mapped.draft
        assert draft.type == "fhir_condition"
        assert draft.parents == (enc_id,)
        assert draft.content["condition_name"] == "Pneumonia"
        assert draft.content["clinical_status"] == "active"
        assert draft.timestamp == "2026-01-20T09:30:00Z"
        assert draft.author == BRIDGE_AUTHOR
        assert draft.content["fhir"]["resourceType"] == "Condition"

    def test_immunization_parents_to_patient_root(self):
        ctx = _ctx_with_root()
        entry = _entry(
            {
                "resourceType": "Immunization",
                "vaccineCode": {"text": "Influenza"},
                "occurrenceDateTime": "2026-01-20T09:00:00Z",
                "encounter": {"reference": "urn:uuid:enc-1"},
            }
        )
        mapped = map_resource(entry, ctx)
        assert mapped.draft.parents == (ctx.root_id,)

    def test_claim_is_administrative(self):
        ctx = _ctx_with_root()
        mapped = map_resource(_entry({"resourceType": "Claim", "created": "2026-01-21T10:00:00Z"}), ctx)
        assert mapped.kind == "administrative"
        assert mapped.draft.content["administrative"] is True
        assert mapped.draft.type == "fhir_claim"

    def test_unknown_type_unsupported(self):
        ctx = _ctx_with_root()
        mapped = map_resource(_entry({"resourceType": "Location", "name": "Campus"}), ctx)
        assert mapped.kind == "unsupported"
        assert mapped.draft is None

    def test_observation_value_quantity(self):
        ctx = _ctx_with_root()
        entry = _entry(
            {
                "resourceType": "Observation",
                "valueQuantity": {"value": 98.6, "unit": "degF"},
                "interpretation": [{"coding": [{"code": "H"}]}],
                "effectiveDateTime": "2026-01-20T09:00:00Z",
            }
        )
        content = map_resource(entry, ctx).draft.content
        assert content["value"] == 98.6
        assert content["unit"] == "degF"
        assert content["interpretation"] == "H"

    def test_dangling_reference_falls_back_to_root(self):
        ctx = _ctx_with_root()
        ctx.resource_types_by_ref["urn:uuid:ghost"] = "Encounter"
        entry = _entry(
            {
                "resourceType": "Observation",
                "encounter": {"reference": "urn:uuid:ghost"},
                "effectiveDateTime": "2026-01-20T09:00:00Z",
            }
        )
        mapped = map_resource(entry, ctx)
        assert mapped.dangling == 1
        assert mapped.draft.parents == (ctx.root_id,)

    def test_timestamp_fallback_to_encounter(self):
        ctx = _ctx_with_root()
        enc_id = "sha256:" + "c" * 64
        ctx.ref_map._map["urn:uuid:enc-2"] = enc_id
        ctx.encounter_starts[enc_id] = "2026-01-22T08:00:00Z"
        entry = _entry({"resourceType": "Procedure", "encounter": {"reference": "urn:uuid:enc-2"}})
        draft = map_resource(entry, ctx).draft
        assert draft.timestamp == "2026-01-22T08:00:00Z"
        assert draft.content["timestamp_source"] == "encounter"

    def test_date_only_timestamp_floored_to_midnight(self):
        ctx = _ctx_with_root()
        entry = _entry({"resourceType": "Patient", "birthDate": "1987-04-12"})
        draft = map_resource(entry, ctx).draft
        assert draft.timestamp == "1987-04-12T00:00:00Z"
        assert draft.type == PATIENT_ROOT_TYPE
        assert draft.parents == ()


class TestConvertBundle:
    def test_patient_only_bundle(self, store, tmp_path):
        path = tmp_path / "solo.json"
        path.write_text(json.dumps({
            "resourceType": "Bundle",
            "type": "transaction",
            "entry": [{
                "fullUrl": "urn:uuid:p1",
                "resource": {"resourceType": "Patient", "id": "p1", "birthDate": "2000-01-01"},
            }],
        }))
        root_id, stats = convert_bundle(load_bundle(path), store)
        assert stats.total_converted == 1
        bead = store.get(root_id)
        assert bead.parents == ()
        assert bead.type == PATIENT_ROOT_TYPE

    def test_no_patient(self, store, tmp_path):
        path = tmp_path / "nopat.json"
        path.write_text(json.dumps({
            "resourceType": "Bundle", "type": "transaction",
            "entry": [{"fullUrl": "urn:uuid:e", "resource": {"resourceType": "Encounter", "id": "e"}}],
        }))
        with pytest.raises(NoPatientError):
            convert_bundle(load_bundle(path), store)

    def test_multiple_patients(self, store, tmp_path):
        path = tmp_path / "two.json"
        entry = [
            {"fullUrl": f"urn:uuid:p{i}", "resource": {"resourceType": "Patient", "id": f"p{i}", "birthDate": "2000-01-0%d" % (i + 1)}}
            for i in range(2)
        ]
        path.write_text(json.dumps({"resourceType": "Bundle", "type": "transaction", "entry": entry}))
        with pytest.raises(MultiplePatientsError):
            convert_bundle(load_bundle(path), store)

    def test_medication_request_gets_encounter_and_condition_parents(self, store, index, fixtures_dir):
        bundle = load_bundle(fixtures_dir / "bundle_amelia_rivera.json")
        convert_bundle(bundle, store, index)
        med_beads = [
            store.get(i) for i in store.list_object_ids()
            if store.get(i).type == "fhir_medicationrequest"
        ]
        assert med_beads
        with_reason = [b for b in med_beads if b.content["fhir"].get("reasonReference")]
        assert with_reason
        for bead in with_reason:
            assert len(bead.parents) == 2
            parent_types = {store.get(p).type for p in bead.parents}
            assert parent_types == {"fhir_encounter", "fhir_condition"}

    def test_counts_cover_every_entry(self, store, fixtures_dir):
        bundle = load_bundle(fixtures_dir / "bundle_noah_kimura.json")
        _, stats = convert_bundle(bundle, store)
        assert stats.total_converted + stats.total_filtered + stats.total_skipped == len(bundle.entries)
        assert stats.skipped == {"Location": 1}
        assert stats.dangling_references == 0

    def test_acyclic_and_fully_connected(self, store, index, fixtures_dir):
        bundle = load_bundle(fixtures_dir / "bundle_amelia_rivera.json")
        root_id, stats = convert_bundle(bundle, store, index)
        beads = {i: store.get(i) for i in store.list_object_ids()}
        sorter = TopologicalSorter({i: list(b.parents) for i, b in beads.items()})
        order = list(sorter.static_order())  # raises CycleError on a cycle
        assert len(order) == len(beads)
        reachable = set(get_descendants(StoreGraph(store, index), root_id, depth=None).bead_ids())
        assert reachable | {root_id} == set(beads)

    def test_reingestion_creates_no_new_objects(self, store, index, fixtures_dir):
        bundle = load_bundle(fixtures_dir / "bundle_olivia_brennan.json")
        convert_bundle(bundle, store, index)
        before = sorted(store.list_object_ids())
        convert_bundle(bundle, store, index)
        assert sorted(store.list_object_ids()) == before

    def test_original_resource_recoverable(self, store, fixtures_dir):
        bundle = load_bundle(fixtures_dir / "bundle_olivia_brennan.json")
        convert_bundle(bundle, store)
        stored_resources = []
        for bead_id in store.list_object_ids():
            fhir = store.get(bead_id).content.get("fhir")
            assert fhir is not None
            stored_resources.append(fhir)
        originals = {json.dumps(e.resource, sort_keys=True) for e in bundle.entries
                     if e.resource["resourceType"] != "Location"}
        recovered = {json.dumps(r, sort_keys=True) for r in stored_resources}
        assert recovered == originals

    def test_administrative_beads_stored_but_flagged(self, store, fixtures_dir):
        bundle = load_bundle(fixtures_dir / "bundle_amelia_rivera.json")
        _, stats = convert_bundle(bundle, store)
        claim_beads = [store.get(i) for i in store.list_object_ids() if store.get(i).type == "fhir_claim"]
        assert len(claim_beads) == stats.filtered["Claim"] > 0
        assert all(b.content["administrative"] is True for b in claim_beads)
