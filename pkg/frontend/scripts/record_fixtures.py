"""Record real service responses as byte-exact fixtures for the UI tests.

Runs the attrflower service in-process on a deterministic synthetic
dataset, performs the calls the explorer makes, and saves each response
body verbatim under tests/fixtures/. Re-run after changing the service.
"""

import json
import time
from pathlib import Path

from fastapi.testclient import TestClient

import attrflower as af
from attrflower.dataset import manifest_document
from attrflower.service import create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

EMBED_CONFIG = {"perplexity": 6.0, "n_iter": 120, "seed": 4}


def save(name: str, response) -> None:
    path = FIXTURE_DIR / name
    path.write_bytes(response.content)
    print(f"wrote {path} ({len(response.content)} bytes)")


def wait(client, dataset_id, job_id):
    while True:
        resp = client.get(f"/datasets/{dataset_id}/embeddings/{job_id}")
        if resp.json()["status"] != "running":
            return resp
        time.sleep(0.02)


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    ds = af.generate_synthetic(n=30, k=5, d=12, n_clusters=3, noise=0.3, seed=24)
    app = create_app()
    with TestClient(app) as client:
        upload = client.post("/datasets", json=manifest_document(ds))
        dataset_id = upload.json()["id"]

        save("dataset-list.json", client.get("/datasets"))
        save("dataset-summary.json", client.get(f"/datasets/{dataset_id}"))

        for space in ("act", "fea", "prd"):
            submit = client.post(f"/datasets/{dataset_id}/embeddings",
                                 json={"space": space, "config": EMBED_CONFIG})
            wait(client, dataset_id, submit.json()["job_id"])
            save(f"embedding-{space}.json",
                 client.get(f"/datasets/{dataset_id}/embeddings",
                            params={"space": space}))

        save("glyphs-fea-joint.json",
             client.get(f"/datasets/{dataset_id}/glyphs",
                        params={"space": "fea", "mode": "joint"}))
        save("glyphs-fea-act.json",
             client.get(f"/datasets/{dataset_id}/glyphs",
                        params={"space": "fea", "mode": "act"}))

        session = client.post("/sessions", json={"dataset_id": dataset_id})
        session_id = session.json()["id"]
        save("session.json", session)

        coords = client.get(f"/datasets/{dataset_id}/embeddings",
                            params={"space": "fea"}).json()["coords"]
        xs = sorted(c[0] for c in coords)
        ys = sorted(c[1] for c in coords)
        x_mid, y_lo, y_hi = xs[len(xs) // 2], ys[0] - 1, ys[-1] + 1
        polygon = [[xs[0] - 1, y_lo], [x_mid, y_lo], [x_mid, y_hi], [xs[0] - 1, y_hi]]
        selection = client.post(f"/sessions/{session_id}/selections",
                                json={"polygon": polygon, "space": "fea"})
        save("selection.json", selection)
        selection_id = selection.json()["id"]

        save("selection-metrics.json",
             client.get(f"/sessions/{session_id}/selections/{selection_id}/metrics"))
        save("selection-metrics-filtered.json",
             client.get(f"/sessions/{session_id}/selections/{selection_id}/metrics",
                        params={"attributes": "0,2", "threshold": 0.4}))

        record_ids = selection.json()["record_ids"]
        save("record-detail-a.json",
             client.get(f"/datasets/{dataset_id}/records/{record_ids[0]}"))
        save("record-detail-b.json",
             client.get(f"/datasets/{dataset_id}/records/{record_ids[-1]}"))

        manifest = json.dumps({"note": "fixtures recorded from live service",
                               "dataset_id": dataset_id,
                               "session_id": session_id,
                               "selection_id": selection_id,
                               "embed_config": EMBED_CONFIG}, indent=1)
        (FIXTURE_DIR / "provenance.json").write_text(manifest + "\n")
        print("provenance written")


if __name__ == "__main__":
    main()
