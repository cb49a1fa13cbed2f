#!/usr/bin/env python3
"""Regenerate the synthetic FHIR bundle fixtures under tests/fixtures/.

The bundles mimic Synthea R4 transaction output: one Patient per bundle,
urn:uuid fullUrl references, encounters with periods, conditions with
SNOMED-style codings, observations with valueQuantity, medication requests
with reasonReference into conditions, plus administrative resources
(claims, benefit statements, care plans) and one deliberately unsupported
resource type. Deterministic: same seed, same bytes.
"""

from __future__ import annotations

import json
import random
import uuid
from datetime import datetime, timedelta
from pathlib import Path

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SNOMED = "http://snomed.info/sct"
LOINC = "http://loinc.org"
RXNORM = "http://www.nlm.nih.gov/research/umls/rxnorm"
COND_CLINICAL = "http://terminology.hl7.org/CodeSystem/condition-clinical"
COND_VERIFY = "http://terminology.hl7.org/CodeSystem/condition-ver-status"
ACT_CLASS = "http://terminology.hl7.org/CodeSystem/v3-ActCode"

CONDITIONS = [
    ("233604007", "Pneumonia"),
    ("44054006", "Diabetes mellitus type 2"),
    ("38341003", "Essential hypertension"),
    ("195967001", "Asthma"),
    ("302870006", "Hypertriglyceridemia"),
    ("15777000", "Prediabetes"),
    ("271737000", "Anemia"),
]

OBSERVATIONS = [
    ("8867-4", "Heart rate", 60.0, 100.0, "/min"),
    ("8480-6", "Systolic blood pressure", 100.0, 160.0, "mm[Hg]"),
    ("2339-0", "Glucose", 65.0, 140.0, "mg/dL"),
    ("718-7", "Hemoglobin", 11.0, 17.0, "g/dL"),
    ("2093-3", "Total cholesterol", 140.0, 260.0, "mg/dL"),
    ("29463-7", "Body weight", 50.0, 110.0, "kg"),
]

MEDICATIONS = [
    ("313820", "Acetaminophen 160 MG Chewable Tablet", "Take one tablet every 6 hours as needed."),
    ("860975", "Metformin hydrochloride 500 MG Oral Tablet", "Take twice daily with meals."),
    ("308136", "Amlodipine 2.5 MG Oral Tablet", "Take one tablet daily."),
    ("745679", "Albuterol 0.09 MG/ACTUAT inhaler", "Two puffs every 4 hours as needed."),
    ("562251", "Amoxicillin 250 MG Oral Capsule", "One capsule three times daily for 10 days."),
]

PROCEDURES = [
    ("430193006", "Medication reconciliation"),
    ("76601001", "Intramuscular injection"),
    ("398423002", "Standard chest X-ray"),
    ("271442007", "Fetal anatomy study"),
]

ENCOUNTER_TYPES = [
    ("AMB", "185349003", "Encounter for check up"),
    ("AMB", "185345009", "Encounter for symptom"),
    ("EMER", "50849002", "Emergency room admission"),
    ("AMB", "410620009", "Well child visit"),
]

PATIENTS = [
    {
        "family": "Rivera",
        "given": ["Amelia", "Sofia"],
        "gender": "female",
        "birthDate": "1987-04-12",
        "city": "Boston",
        "encounters": 4,
        "pneumonia": True,
        "unsupported": 0,
    },
    {
        "family": "Kimura",
        "given": ["Noah"],
        "gender": "male",
        "birthDate": "1954-11-03",
        "city": "Worcester",
        "encounters": 3,
        "pneumonia": False,
        "unsupported": 1,
    },
    {
        "family": "Brennan",
        "given": ["Olivia", "Mae"],
        "gender": "female",
        "birthDate": "2001-08-27",
        "city": "Springfield",
        "encounters": 2,
        "pneumonia": False,
        "unsupported": 0,
    },
]


def _uuid(rng: random.Random) -> str:
    return str(uuid.UUID(int=rng.getrandbits(128), version=4))


def _offset_iso(dt: datetime, rng: random.Random) -> str:
    # Synthea emits local offsets; mix them in to exercise instant parsing.
    offset = rng.choice(["-05:00", "-04:00", "+00:00"])
    return dt.strftime(f"%Y-%m-%dT%H:%M:%S{offset}")


def build_bundle(spec: dict, rng: random.Random) -> dict:
    patient_uuid = _uuid(rng)
    patient_url = f"urn:uuid:{patient_uuid}"
    entries = []

    def add(resource: dict, rid: str) -> str:
        url = f"urn:uuid:{rid}"
        entries.append(
            {
                "fullUrl": url,
                "resource": {"id": rid, **resource},
                "request": {"method": "POST", "url": resource["resourceType"]},
            }
        )
        return url

    add(
        {
            "resourceType": "Patient",
            "name": [{"use": "official", "family": spec["family"], "given": spec["given"]}],
            "gender": spec["gender"],
            "birthDate": spec["birthDate"],
            "address": [{"city": spec["city"], "state": "Massachusetts", "country": "US"}],
        },
        patient_uuid,
    )

    birth = datetime.fromisoformat(spec["birthDate"] + "T00:00:00+00:00")
    when = birth + timedelta(days=rng.randint(6000, 9000), hours=rng.randint(8, 17))

    for enc_index in range(spec["encounters"]):
        when = when + timedelta(days=rng.randint(20, 400), hours=rng.randint(0, 6))
        enc_uuid = _uuid(rng)
        enc_url = f"urn:uuid:{enc_uuid}"
        cls, type_code, type_display = rng.choice(ENCOUNTER_TYPES)
        start = _offset_iso(when, rng)
        end = _offset_iso(when + timedelta(minutes=rng.randint(15, 90)), rng)
        add(
            {
                "resourceType": "Encounter",
                "status": "finished",
                "class": {"system": ACT_CLASS, "code": cls},
                "type": [{"coding": [{"system": SNOMED, "code": type_code, "display": type_display}], "text": type_display}],
                "subject": {"reference": patient_url},
                "period": {"start": start, "end": end},
            },
            enc_uuid,
        )

        condition_urls = []
        n_conditions = 1 if (spec["pneumonia"] and enc_index == 0) else rng.randint(0, 2)
        for c in range(n_conditions):
            if spec["pneumonia"] and enc_index == 0 and c == 0:
                code, display = CONDITIONS[0]  # Pneumonia
            else:
                code, display = rng.choice(CONDITIONS[1:])
            cond_uuid = _uuid(rng)
            condition_urls.append(f"urn:uuid:{cond_uuid}")
            add(
                {
                    "resourceType": "Condition",
                    "clinicalStatus": {"coding": [{"system": COND_CLINICAL, "code": "active"}]},
                    "verificationStatus": {"coding": [{"system": COND_VERIFY, "code": "confirmed"}]},
                    "code": {"coding": [{"system": SNOMED, "code": code, "display": display}], "text": display},
                    "subject": {"reference": patient_url},
                    "encounter": {"reference": enc_url},
                    "onsetDateTime": start,
                    "recordedDate": start,
                },
                cond_uuid,
            )

        for _ in range(rng.randint(1, 3)):
            loinc, display, low, high, unit = rng.choice(OBSERVATIONS)
            value = round(rng.uniform(low, high), 1)
            add(
                {
                    "resourceType": "Observation",
                    "status": "final",
                    "category": [{"coding": [{"system": "http://terminology.hl7.org/CodeSystem/observation-category", "code": "vital-signs"}]}],
                    "code": {"coding": [{"system": LOINC, "code": loinc, "display": display}], "text": display},
                    "subject": {"reference": patient_url},
                    "encounter": {"reference": enc_url},
                    "effectiveDateTime": start,
                    "issued": start,
                    "valueQuantity": {"value": value, "unit": unit, "system": "http://unitsofmeasure.org", "code": unit},
                },
                _uuid(rng),
            )

        if condition_urls and rng.random() < 0.9:
            rx_code, rx_display, dosage = rng.choice(MEDICATIONS)
            add(
                {
                    "resourceType": "MedicationRequest",
                    "status": "active",
                    "intent": "order",
                    "medicationCodeableConcept": {"coding": [{"system": RXNORM, "code": rx_code, "display": rx_display}], "text": rx_display},
                    "subject": {"reference": patient_url},
                    "encounter": {"reference": enc_url},
                    "authoredOn": start,
                    "reasonReference": [{"reference": condition_urls[0]}],
                    "dosageInstruction": [{"sequence": 1, "text": dosage}],
                },
                _uuid(rng),
            )

        if rng.random() < 0.6:
            p_code, p_display = rng.choice(PROCEDURES)
            add(
                {
                    "resourceType": "Procedure",
                    "status": "completed",
                    "code": {"coding": [{"system": SNOMED, "code": p_code, "display": p_display}], "text": p_display},
                    "subject": {"reference": patient_url},
                    "encounter": {"reference": enc_url},
                    "performedPeriod": {"start": start, "end": end},
                },
                _uuid(rng),
            )

        if rng.random() < 0.5:
            add(
                {
                    "resourceType": "Immunization",
                    "status": "completed",
                    "vaccineCode": {"coding": [{"system": "http://hl7.org/fhir/sid/cvx", "code": "140", "display": "Influenza, seasonal, injectable"}], "text": "Influenza, seasonal, injectable"},
                    "patient": {"reference": patient_url},
                    "encounter": {"reference": enc_url},
                    "occurrenceDateTime": start,
                },
                _uuid(rng),
            )

        if spec["pneumonia"] and enc_index == 0:
            add(
                {
                    "resourceType": "DiagnosticReport",
                    "status": "final",
                    "code": {"coding": [{"system": LOINC, "code": "30746-2", "display": "Chest X-ray report"}], "text": "Chest X-ray report"},
                    "subject": {"reference": patient_url},
                    "encounter": {"reference": enc_url},
                    "effectiveDateTime": start,
                    "issued": start,
                },
                _uuid(rng),
            )
            add(
                {
                    "resourceType": "ImagingStudy",
                    "status": "available",
                    "subject": {"reference": patient_url},
                    "encounter": {"reference": enc_url},
                    "started": start,
                    "numberOfSeries": 1,
                    "numberOfInstances": 2,
                },
                _uuid(rng),
            )
            add(
                {
                    "resourceType": "DocumentReference",
                    "status": "current",
                    "type": {"coding": [{"system": LOINC, "code": "34117-2", "display": "History and physical note"}]},
                    "subject": {"reference": patient_url},
                    "date": start,
                    "context": {"encounter": [{"reference": enc_url}]},
                },
                _uuid(rng),
            )

        # Administrative tail for the encounter, as Synthea emits.
        claim_uuid = _uuid(rng)
        add(
            {
                "resourceType": "Claim",
                "status": "active",
                "type": {"coding": [{"system": "http://terminology.hl7.org/CodeSystem/claim-type", "code": "institutional"}]},
                "use": "claim",
                "patient": {"reference": patient_url},
                "billablePeriod": {"start": start, "end": end},
                "created": end,
                "total": {"value": round(rng.uniform(80, 1500), 2), "currency": "USD"},
            },
            claim_uuid,
        )
        add(
            {
                "resourceType": "ExplanationOfBenefit",
                "status": "active",
                "use": "claim",
                "patient": {"reference": patient_url},
                "billablePeriod": {"start": start, "end": end},
                "created": end,
                "claim": {"reference": f"urn:uuid:{claim_uuid}"},
                "outcome": "complete",
            },
            _uuid(rng),
        )

    if spec["pneumonia"]:
        add(
            {
                "resourceType": "CarePlan",
                "status": "active",
                "intent": "order",
                "category": [{"coding": [{"system": SNOMED, "code": "736376001", "display": "Infectious disease care plan"}]}],
                "subject": {"reference": patient_url},
                "period": {"start": _offset_iso(when, rng)},
            },
            _uuid(rng),
        )
    for _ in range(spec["unsupported"]):
        add(
            {
                "resourceType": "Location",
                "status": "active",
                "name": "General Hospital Campus",
            },
            _uuid(rng),
        )
    add(
        {
            "resourceType": "Provenance",
            "target": [{"reference": patient_url}],
            "recorded": _offset_iso(when + timedelta(days=1), rng),
        },
        _uuid(rng),
    )

    return {"resourceType": "Bundle", "type": "transaction", "entry": entries}


def main() -> None:
    rng = random.Random(20260811)
    FIXTURES_DIR.mkdir(parents=True, exist_ok=True)
    for spec in PATIENTS:
        bundle = build_bundle(spec, rng)
        name = f"bundle_{spec['given'][0].lower()}_{spec['family'].lower()}.json"
        out = FIXTURES_DIR / name
        out.write_text(json.dumps(bundle, indent=2), encoding="utf-8")
        print(f"wrote {out} ({len(bundle['entry'])} entries)")
    (FIXTURES_DIR / "malformed.json").write_text("{not json", encoding="utf-8")
    print("wrote malformed.json")


if __name__ == "__main__":
    main()
