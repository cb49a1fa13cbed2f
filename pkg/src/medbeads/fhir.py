"""Conversion of FHIR bundles (Synthea output) into causally linked beads.

FHIR expresses relationships as mutable reference strings; conversion
turns them into explicit parent links. Each bundle holds exactly one
Patient, which becomes the genesis bead anchoring that patient's subgraph;
everything else hangs off it in dependency order, so the resulting graph
is acyclic and fully connected by construction.

Administrative resources (claims, benefit statements, care plans, ...) are
stored for auditability with an ``administrative: true`` content flag and
excluded from timeline views by default.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from .beads import Bead, parse_timestamp
from .errors import BundleParseError, MultiplePatientsError, NoPatientError
from .store import BeadStore

BRIDGE_AUTHOR = "did:medbeads:bridge:synthea"

# FHIR resource type -> bead type for the clinical resources.
CLINICAL_TYPES = {
    "Patient": "patient_registration",
    "Encounter": "fhir_encounter",
    "Condition": "fhir_condition",
    "Observation": "fhir_observation",
    "MedicationRequest": "fhir_medicationrequest",
    "DiagnosticReport": "fhir_diagnosticreport",
    "Procedure": "fhir_procedure",
    "Immunization": "fhir_immunization",
    "ImagingStudy": "fhir_imagingstudy",
    "DocumentReference": "fhir_documentreference",
}

# Ingested but flagged administrative and hidden from timelines by default.
ADMINISTRATIVE_TYPES = {
    "Claim",
    "ExplanationOfBenefit",
    "CarePlan",
    "CareTeam",
    "Device",
    "SupplyDelivery",
    "Provenance",
}

# Candidate timestamp fields per resource type, first entry is the primary;
# a bead records content.timestamp_source whenever a non-primary source won.
_TIMESTAMP_FIELDS: dict[str, list[str]] = {
    "Encounter": ["period.start", "period.end"],
    "Condition": ["onsetDateTime", "recordedDate", "assertedDate"],
    "Observation": ["effectiveDateTime", "issued"],
    "MedicationRequest": ["authoredOn"],
    "DiagnosticReport": ["effectiveDateTime", "issued"],
    "Procedure": ["performedDateTime", "performedPeriod.start"],
    "Immunization": ["occurrenceDateTime", "date"],
    "ImagingStudy": ["started"],
    "DocumentReference": ["date"],
    "Claim": ["created", "billablePeriod.start"],
    "ExplanationOfBenefit": ["created", "billablePeriod.start"],
    "CarePlan": ["period.start", "created"],
    "CareTeam": ["period.start"],
    "Device": ["manufactureDate", "expirationDate"],
    "SupplyDelivery": ["occurrenceDateTime"],
    "Provenance": ["recorded"],
}

_DATE_ONLY_RE = re.compile(r"^\d{4}(-\d{2})?(-\d{2})?$")
_NAIVE_DT_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2})?(\.\d+)?$")


@dataclass(frozen=True)
class FhirEntry:
    full_url: str | None
    resource: dict


@dataclass(frozen=True)
class FhirBundle:
    entries: tuple[FhirEntry, ...]
    source_file: str | None = None


@dataclass
class ConversionStats:
    """Per-resource-type tallies; converted + filtered + skipped covers
    every bundle entry exactly once."""

    converted: Counter = field(default_factory=Counter)
    filtered: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    dangling_references: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def total_converted(self) -> int:
        return sum(self.converted.values())

    @property
    def total_filtered(self) -> int:
        return sum(self.filtered.values())

    @property
    def total_skipped(self) -> int:
        return sum(self.skipped.values())

    def to_dict(self) -> dict:
        return {
            "converted": dict(sorted(self.converted.items())),
            "filtered": dict(sorted(self.filtered.items())),
            "skipped": dict(sorted(self.skipped.items())),
            "dangling_references": self.dangling_references,
            "errors": list(self.errors),
        }


@dataclass(frozen=True)
class MappedResource:
    """Outcome of mapping a single FHIR resource."""

    kind: str  # "converted" | "administrative" | "unsupported"
    draft: Bead | None = None
    dangling: int = 0


def load_bundle(path: str | Path) -> FhirBundle:
    """Parse a bundle file into ordered entries."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise BundleParseError(f"cannot read bundle: {exc}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise BundleParseError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", path=str(path)
        ) from exc
    if not isinstance(raw, dict) or raw.get("resourceType") != "Bundle":
        raise BundleParseError("file is not a FHIR Bundle", path=str(path))
    entries = []
    for i, entry in enumerate(raw.get("entry", [])):
        resource = entry.get("resource")
        if not isinstance(resource, dict) or "resourceType" not in resource or "id" not in resource:
            raise BundleParseError(f"entry {i} has no resource with resourceType and id", path=str(path))
        entries.append(FhirEntry(full_url=entry.get("fullUrl"), resource=resource))
    return FhirBundle(entries=tuple(entries), source_file=str(path))


def iter_bundle_paths(path: str | Path) -> Iterator[Path]:
    """A bundle file yields itself; a directory yields its *.json sorted."""
    path = Path(path)
    if path.is_dir():
        yield from sorted(p for p in path.iterdir() if p.suffix == ".json" and p.is_file())
    else:
        yield path


def _get_path(obj: Any, dotted: str) -> Any:
    current = obj
    for part in dotted.split("."):
        if not isinstance(current, dict):
            return None
        current = current.get(part)
    return current


def _normalize_instant(value: Any) -> str | None:
    """Coerce a FHIR date/dateTime to a full ISO instant, or None.

    Partial dates are floored (midnight UTC, first day/month); already-valid
    instants pass through untouched so nothing is silently rewritten.
    """
    if not isinstance(value, str) or not value:
        return None
    text = value.strip()
    if _DATE_ONLY_RE.match(text):
        parts = text.split("-")
        while len(parts) < 3:
            parts.append("01")
        text = "-".join(parts) + "T00:00:00Z"
    elif _NAIVE_DT_RE.match(text):
        text = text + "Z"
    try:
        parse_timestamp(text)
    except ValueError:
        return None
    return text


def _reference_strings(value: Any) -> list[str]:
    """Flatten a FHIR Reference | list[Reference] into reference strings."""
    if isinstance(value, dict):
        ref = value.get("reference")
        return [ref] if isinstance(ref, str) else []
    if isinstance(value, list):
        out = []
        for item in value:
            out.extend(_reference_strings(item))
        return out
    return []


def _encounter_refs(resource: dict) -> list[str]:
    # R4 uses `encounter`; STU3 used `context`; DocumentReference nests it.
    for key in ("encounter", "context"):
        refs = _reference_strings(resource.get(key))
        if refs:
            return refs
    nested = _get_path(resource, "context")
    if isinstance(nested, dict):
        refs = _reference_strings(nested.get("encounter"))
        if refs:
            return refs
    return []


def _codeable_text(value: Any) -> str | None:
    """Display string of a CodeableConcept (text, else first coding)."""
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        if isinstance(value.get("text"), str):
            return value["text"]
        codings = value.get("coding")
        if isinstance(codings, list) and codings:
            first = codings[0]
            if isinstance(first, dict):
                return first.get("display") or first.get("code")
    return None


def _codeable_code(value: Any) -> str | None:
    """Code of a CodeableConcept (first coding's code, else text)."""
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        codings = value.get("coding")
        if isinstance(codings, list) and codings:
            first = codings[0]
            if isinstance(first, dict) and first.get("code") is not None:
                return first.get("code")
        if isinstance(value.get("text"), str):
            return value["text"]
    return None


def _extract_fields(resource_type: str, resource: dict) -> dict:
    """Structured field extraction into bead content."""
    content: dict[str, Any] = {}
    if resource_type == "Encounter":
        code = _get_path(resource, "class.code")
        if code is not None:
            content["encounter_type"] = code
    elif resource_type == "Condition":
        name = _codeable_text(resource.get("code"))
        if name is not None:
            content["condition_name"] = name
        status = _codeable_code(resource.get("clinicalStatus"))
        if status is not None:
            content["clinical_status"] = status
    elif resource_type == "Observation":
        quantity = resource.get("valueQuantity")
        if isinstance(quantity, dict):
            if quantity.get("value") is not None:
                content["value"] = quantity["value"]
            if quantity.get("unit") is not None:
                content["unit"] = quantity["unit"]
        interp = resource.get("interpretation")
        if isinstance(interp, list) and interp:
            interp = interp[0]
        code = _codeable_code(interp)
        if code is not None:
            content["interpretation"] = code
    elif resource_type == "MedicationRequest":
        dosage = resource.get("dosageInstruction")
        if isinstance(dosage, list) and dosage:
            text = dosage[0].get("text") if isinstance(dosage[0], dict) else None
            if text is not None:
                content["dosage"] = text
    elif resource_type == "Procedure":
        outcome = _codeable_text(resource.get("outcome"))
        if outcome is not None:
            content["outcome"] = outcome
    return content


class RefMap:
    """Mapping from FHIR reference strings to bead ids, filled as a bundle
    converts. Each resource registers under its fullUrl and Type/id forms."""

    def __init__(self) -> None:
        self._map: dict[str, str] = {}

    def register(self, entry: FhirEntry, bead_id: str) -> None:
        if entry.full_url:
            self._map[entry.full_url] = bead_id
        resource_type = entry.resource.get("resourceType")
        resource_id = entry.resource.get("id")
        if resource_type and resource_id:
            self._map[f"{resource_type}/{resource_id}"] = bead_id

    def resolve(self, reference: str) -> str | None:
        return self._map.get(reference)

    def __len__(self) -> int:
        return len(self._map)


@dataclass
class _Conversion:
    """Mutable state threaded through one bundle conversion."""

    ref_map: RefMap
    root_id: str | None = None
    root_timestamp: str | None = None
    encounter_starts: dict[str, str] = field(default_factory=dict)  # bead id -> instant
    resource_types_by_ref: dict[str, str] = field(default_factory=dict)


def _resource_timestamp(resource_type: str, resource: dict, ctx: _Conversion,
                        parent_encounter: str | None) -> tuple[str, str | None]:
    """Timestamp plus the source tag to record when a fallback was used."""
    candidates = _TIMESTAMP_FIELDS.get(resource_type, [])
    for i, dotted in enumerate(candidates):
        instant = _normalize_instant(_get_path(resource, dotted))
        if instant is not None:
            return instant, (dotted if i > 0 else None)
    if parent_encounter is not None and parent_encounter in ctx.encounter_starts:
        return ctx.encounter_starts[parent_encounter], "encounter"
    return ctx.root_timestamp or "1970-01-01T00:00:00Z", "patient_root"


def map_resource(entry: FhirEntry, ctx: _Conversion) -> MappedResource:
    """Map one FHIR resource to a bead draft.

    Clinical types follow the resource-to-type table; administrative types
    convert with the ``administrative`` flag; anything else is unsupported.
    Unresolvable parent references count as dangling and the bead falls
    back to the patient root so it stays reachable.
    """
    resource = entry.resource
    resource_type = resource["resourceType"]
    administrative = resource_type in ADMINISTRATIVE_TYPES
    if resource_type not in CLINICAL_TYPES and not administrative:
        return MappedResource(kind="unsupported")
    if resource_type == "Patient":
        birth = _normalize_instant(resource.get("birthDate"))
        timestamp = birth or "1970-01-01T00:00:00Z"
        content: dict[str, Any] = {"fhir": resource}
        if birth is None:
            content["timestamp_source"] = "missing_birth_date"
        draft = Bead(
            type=CLINICAL_TYPES["Patient"],
            timestamp=timestamp,
            author=BRIDGE_AUTHOR,
            parents=(),
            content=content,
        )
        return MappedResource(kind="converted", draft=draft)

    dangling = 0
    parents: list[str] = []

    def resolve_all(refs: list[str], only_type: str | None = None) -> None:
        nonlocal dangling
        for ref in refs:
            if only_type is not None and ctx.resource_types_by_ref.get(ref) != only_type:
                continue
            resolved = ctx.ref_map.resolve(ref)
            if resolved is None:
                dangling += 1
            elif resolved not in parents:
                parents.append(resolved)

    parent_encounter: str | None = None
    if administrative:
        pass  # administrative records hang off the patient root
    elif resource_type in ("Encounter", "Immunization"):
        pass  # per the mapping table these attach to the patient root
    else:
        encounter_refs = _encounter_refs(resource)
        resolve_all(encounter_refs[:1])
        if parents:
            parent_encounter = parents[0]
        if resource_type == "MedicationRequest":
            reason_refs = _reference_strings(resource.get("reasonReference"))
            resolve_all(reason_refs, only_type="Condition")

    if not parents:
        if ctx.root_id is None:
            raise NoPatientError("no patient root available")
        parents = [ctx.root_id]

    timestamp, ts_source = _resource_timestamp(resource_type, resource, ctx, parent_encounter)
    bead_type = CLINICAL_TYPES.get(resource_type, f"fhir_{resource_type.lower()}")
    content = dict(_extract_fields(resource_type, resource))
    if administrative:
        content["administrative"] = True
    if ts_source is not None:
        content["timestamp_source"] = ts_source
    content["fhir"] = resource
    draft = Bead(
        type=bead_type,
        timestamp=timestamp,
        author=BRIDGE_AUTHOR,
        parents=tuple(parents),
        content=content,
    )
    kind = "administrative" if administrative else "converted"
    return MappedResource(kind=kind, draft=draft, dangling=dangling)


def _phase(resource_type: str) -> int:
    # Dependency order: patient, then encounters, then conditions (so
    # medication reason references resolve), then everything else.
    return {"Patient": 0, "Encounter": 1, "Condition": 2}.get(resource_type, 3)


def convert_bundle(bundle: FhirBundle, store: BeadStore, index=None) -> tuple[str, ConversionStats]:
    """Convert one single-patient bundle, writing beads through the store.

    Returns the patient root id and per-type stats. Per-resource failures
    accumulate in the stats rather than aborting the bundle.
    """
    stats = ConversionStats()
    patients = [e for e in bundle.entries if e.resource["resourceType"] == "Patient"]
    if not patients:
        raise NoPatientError(f"bundle has no Patient resource: {bundle.source_file}")
    if len(patients) > 1:
        raise MultiplePatientsError(f"bundle has {len(patients)} Patient resources: {bundle.source_file}")

    ctx = _Conversion(ref_map=RefMap())
    for entry in bundle.entries:
        rt = entry.resource["resourceType"]
        if entry.full_url:
            ctx.resource_types_by_ref[entry.full_url] = rt
        if entry.resource.get("id"):
            ctx.resource_types_by_ref[f"{rt}/{entry.resource['id']}"] = rt

    ordered = sorted(range(len(bundle.entries)), key=lambda i: (_phase(bundle.entries[i].resource["resourceType"]), i))
    root_id: str | None = None
    for i in ordered:
        entry = bundle.entries[i]
        resource_type = entry.resource["resourceType"]
        try:
            mapped = map_resource(entry, ctx)
        except Exception as exc:
            stats.skipped[resource_type] += 1
            stats.errors.append(f"{resource_type}/{entry.resource.get('id')}: {exc}")
            continue
        if mapped.kind == "unsupported":
            stats.skipped[resource_type] += 1
            continue
        assert mapped.draft is not None
        try:
            bead_id = store.put(mapped.draft)
        except Exception as exc:
            stats.skipped[resource_type] += 1
            stats.errors.append(f"{resource_type}/{entry.resource.get('id')}: {exc}")
            continue
        if index is not None:
            index.index_bead(mapped.draft.with_id(bead_id))
        ctx.ref_map.register(entry, bead_id)
        stats.dangling_references += mapped.dangling
        if mapped.kind == "administrative":
            stats.filtered[resource_type] += 1
        else:
            stats.converted[resource_type] += 1
        if resource_type == "Patient":
            root_id = bead_id
            ctx.root_id = bead_id
            ctx.root_timestamp = mapped.draft.timestamp
        elif resource_type == "Encounter":
            ctx.encounter_starts[bead_id] = mapped.draft.timestamp

    assert root_id is not None  # the Patient entry is always first in phase order
    return root_id, stats
