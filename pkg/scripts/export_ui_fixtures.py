#!/usr/bin/env python3
"""Capture real API responses into frontend/tests/fixtures/.

Builds a demo store (the three bundle fixtures plus the sensitive
Pneumonia note), boots the service, replays the request set the web UI
makes, and saves each response body under a normalized-URL key so the
frontend test suite runs against genuine server output without a live
backend. Re-run after changing the API or the bundle fixtures.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path
from urllib.parse import parse_qsl, urlsplit

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from fastapi.testclient import TestClient  # noqa: E402

from medbeads.api import create_app  # noqa: E402
from medbeads.beads import Bead, Clearance  # noqa: E402
from medbeads.engine import Engine  # noqa: E402

FIXTURES_OUT = REPO / "frontend" / "tests" / "fixtures"
BUNDLES = sorted((REPO / "tests" / "fixtures").glob("bundle_*.json"))

NOTE_CONTENT = {
    "summary": "Patient presents with dyspnea. Infiltrates observed in right lung field.",
    "structured": {"diagnosis": "Pneumonia", "icd10": "J18.9"},
}


def normalize(path: str) -> str:
    """pathname + sorted decoded query pairs; must match the TS mock."""
    parts = urlsplit(path)
    pairs = sorted(f"{k}={v}" for k, v in parse_qsl(parts.query))
    return parts.path + ("?" + "&".join(pairs) if pairs else "")


def main() -> None:
    FIXTURES_OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as td:
        engine = Engine(td)
        for bundle in BUNDLES:
            engine.ingest(bundle)
        pneumonia = next(
            i for i in engine.store.list_object_ids()
            if engine.store.get(i).content.get("condition_name") == "Pneumonia"
        )
        note = Bead(
            type="medical_note",
            timestamp="2026-01-26T10:00:00Z",
            author="did:medbeads:doctor:12345",
            parents=(pneumonia,),
            content=NOTE_CONTENT,
            clearance=Clearance(denied_roles=("family", "insurance"), reason="sensitive note"),
        )
        note_id, _ = engine.put_bead(note)

        client = TestClient(create_app(engine=engine))
        patients = client.get("/patients").json()

        requests: list[str] = ["/patients"]
        for p in patients:
            requests.append(f"/patients/{p['id']}/beads")
        amelia = next(p["id"] for p in patients if "Rivera" in (p["name"] or ""))
        for role in ("insurance", "specialist"):
            requests.append(f"/patients/{amelia}/beads?role={role}")
        for depth in (3, 5):
            for role_part in ("", "&role=insurance", "&role=specialist"):
                requests.append(f"/beads/context?id={note_id}&depth={depth}{role_part}")
                requests.append(f"/beads/context?id={note_id}&depth={depth}{role_part}&format=text")
        requests.append(f"/beads?id={note_id}")
        requests.append("/health")

        manifest: dict[str, dict] = {}
        for i, path in enumerate(requests):
            response = client.get(path)
            assert response.status_code == 200, f"{path}: {response.status_code}"
            is_text = "format=text" in path
            name = f"r{i:02d}.{'txt' if is_text else 'json'}"
            (FIXTURES_OUT / name).write_bytes(response.content)
            manifest[normalize(path)] = {"file": name, "type": "text" if is_text else "json"}

        meta = {"note_id": note_id, "pneumonia_id": pneumonia, "amelia_root": amelia}
        (FIXTURES_OUT / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
        (FIXTURES_OUT / "meta.json").write_text(json.dumps(meta, indent=2))
        print(f"wrote {len(manifest)} fixtures to {FIXTURES_OUT}")
        engine.close()


if __name__ == "__main__":
    main()
