"""Case-study-shaped walkthrough against the HTTP service, no browser needed.

The workflow: embed all three spaces, select a tight group in the FEA view,
see how the PRD view splits it, and drill into two records side by side.
Runs the service in-process via the ASGI test client; the same calls work
against `attrflower serve`.
"""

import time
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

import attrflower as af
from attrflower.dataset import manifest_document
from attrflower.service import create_app

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

ds = af.generate_synthetic(n=150, k=8, d=64, n_clusters=4, noise=0.2, seed=17)
app = create_app(data_dir=out_dir, cache_dir=out_dir / "cache")

with TestClient(app) as client:
    dataset_id = client.post("/datasets", json=manifest_document(ds)).json()["id"]
    print(f"dataset {dataset_id}: {len(ds)} records")

    coords = {}
    for space in ("act", "fea", "prd"):
        job = client.post(f"/datasets/{dataset_id}/embeddings",
                          json={"space": space,
                                "config": {"perplexity": 12.0, "n_iter": 400,
                                           "seed": 2}}).json()
        while True:
            poll = client.get(
                f"/datasets/{dataset_id}/embeddings/{job['job_id']}").json()
            if poll["status"] != "running":
                break
            time.sleep(0.05)
        coords[space] = np.asarray(poll["result"]["coords"])
        print(f"embedded {space}: final KL {poll['result']['kl_trace'][-1][1]:.3f}")

    session_id = client.post("/sessions", json={"dataset_id": dataset_id}).json()["id"]

    # Brush a tight neighborhood in the FEA view (points near the densest spot).
    fea = coords["fea"]
    anchor = fea[0]
    near = np.argsort(((fea - anchor) ** 2).sum(axis=1))[:20]
    lo = fea[near].min(axis=0) - 0.5
    hi = fea[near].max(axis=0) + 0.5
    polygon = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
    sel = client.post(f"/sessions/{session_id}/selections",
                      json={"polygon": polygon, "space": "fea"}).json()
    print(f"\nselected {len(sel['record_ids'])} records near FEA point 0 "
          f"({sel['color']})")

    metrics = client.get(
        f"/sessions/{session_id}/selections/{sel['id']}/metrics").json()
    print("group confusion:", metrics["confusion"])
    print("group metrics:  ", {k: (round(v, 3) if v is not None else None)
                               for k, v in metrics["report"].items()})

    # How does the PRD view see the same ids? Spread = the head re-separates
    # what the features put together.
    idx = [list(ds.ids).index(r) for r in sel["record_ids"]]
    prd_pts = coords["prd"][idx]
    print(f"PRD-view spread of this selection: x width "
          f"{np.ptp(prd_pts[:, 0]):.1f} vs view width {np.ptp(coords['prd'][:, 0]):.1f}")

    # Drill into two records, the detail-view comparison.
    rid_a, rid_b = sel["record_ids"][0], sel["record_ids"][-1]
    for rid in (rid_a, rid_b):
        detail = client.get(f"/datasets/{dataset_id}/records/{rid}").json()
        flags = [a["outcome"] for a in detail["attributes"]]
        print(f"\n{rid}: outcomes {flags}")
        print(f"  distances: {detail['distances']}")
        thumb = client.get(detail["image_url"])
        print(f"  thumbnail: {thumb.headers['content-type']}, "
              f"{len(thumb.content)} bytes")
