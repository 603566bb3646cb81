"""Acceptance suite: one test per primary criterion, each printing a
pass/fail line (run with -s to see them inline).

Tolerances are pinned here and nowhere else: counts exact, metrics 1e-12,
gradient 1e-4 relative L2, Barnes-Hut 5%, trustworthiness 0.95, silhouette
0.5, with per-criterion wall-clock budgets.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

import attrflower as af
from attrflower import ConfusionSummary, FlowerMode, Outcome, TsneConfig
from attrflower.glyph import BLACK, TN_OUTLINE, layout_flower
from attrflower.service import create_app

from conftest import random_dataset
from oracles import (
    brute_average_precision,
    brute_confusion,
    brute_report,
    finite_difference_gradient,
    silhouette,
    trustworthiness,
)


def report_pass(name, elapsed=None):
    suffix = f" ({elapsed:.1f}s)" if elapsed is not None else ""
    print(f"[ACCEPTANCE] {name}: PASS{suffix}")


class TestAcceptancePrimary:

    def test_metrics_oracle_equivalence(self):
        """100 random datasets (n<=50, K<=5): confusion, metrics and AP match
        the brute-force oracle exactly; < 10 s."""
        start = time.perf_counter()
        rng = np.random.default_rng(20240817)
        for _ in range(100):
            ds = random_dataset(rng, n_max=50, k_max=5)
            threshold = float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
            acts = [r.act.tolist() for r in ds.records]
            prds = [r.prd.tolist() for r in ds.records]
            indices = list(range(ds.schema.k))

            c = af.confusion(ds.records, indices, threshold)
            assert (c.tp, c.tn, c.fp, c.fn) == brute_confusion(
                acts, prds, indices, threshold)

            got = af.report(c)
            want = brute_report(c.tp, c.tn, c.fp, c.fn)
            for g, w in zip((got.accuracy, got.precision, got.recall, got.f1), want):
                if w is None:
                    assert g is None
                else:
                    assert abs(g - w) <= 1e-12

            for j in range(ds.schema.k):
                got_ap = af.average_precision([p[j] for p in prds],
                                              [a[j] for a in acts])
                want_ap = brute_average_precision([p[j] for p in prds],
                                                  [a[j] for a in acts])
                if want_ap is None:
                    assert got_ap is None
                else:
                    assert abs(got_ap - want_ap) <= 1e-12
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0
        report_pass("metrics oracle equivalence (100 random datasets)", elapsed)

    def test_formula_spot_checks(self):
        """The four formulas evaluated exactly: counts (tp=3, tn=5, fp=1,
        fn=1) give accuracy (3+5)/10 = 0.8, and the reference tuple
        (0.9, 0.75, 0.75, 0.75) is realized at tn=15, the unique count
        consistent with precision = recall = 0.75."""
        r = af.report(ConfusionSummary(tp=3, tn=5, fp=1, fn=1, threshold=0.5))
        assert abs(r.accuracy - 0.8) <= 1e-12
        assert abs(r.precision - 0.75) <= 1e-12
        assert abs(r.recall - 0.75) <= 1e-12
        assert abs(r.f1 - 0.75) <= 1e-12

        r = af.report(ConfusionSummary(tp=3, tn=15, fp=1, fn=1, threshold=0.5))
        assert abs(r.accuracy - 0.9) <= 1e-12
        assert abs(r.precision - 0.75) <= 1e-12
        assert abs(r.recall - 0.75) <= 1e-12
        assert abs(r.f1 - 0.75) <= 1e-12

        # F1(precision 0.5, recall 1.0) = 2/3: realized by tp=1, fp=1, fn=0
        r = af.report(ConfusionSummary(tp=1, tn=0, fp=1, fn=0, threshold=0.5))
        assert abs(r.precision - 0.5) <= 1e-12
        assert abs(r.recall - 1.0) <= 1e-12
        assert abs(r.f1 - 2.0 / 3.0) <= 1e-12
        report_pass("formula spot checks")

    def test_gradient_matches_finite_differences(self):
        """Exact gradient vs central finite differences: relative L2 error
        <= 1e-4 on 20 random instances with n <= 20; < 30 s."""
        start = time.perf_counter()
        rng = np.random.default_rng(515151)
        for _ in range(20):
            n = int(rng.integers(4, 21))
            x = rng.normal(0.0, 1.0, size=(n, 4))
            perplexity = float(min(5.0, (n - 1) / 2.0))
            p = af.pairwise_affinities(x, perplexity)
            y = rng.normal(0.0, 1.0, size=(n, 2))
            grad = af.tsne_gradient(p, y)
            fd = finite_difference_gradient(p, y, step=1e-5)
            rel = np.linalg.norm(grad - fd) / np.linalg.norm(fd)
            assert rel <= 1e-4
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0
        report_pass("t-SNE gradient vs finite differences (20 instances)", elapsed)

    def test_tsne_recovers_cluster_structure(self):
        """3x30 separated Gaussian clusters in 10-D: trustworthiness(k=10)
        >= 0.95, silhouette >= 0.5, deterministic per seed; < 60 s."""
        start = time.perf_counter()
        rng = np.random.default_rng(0)
        centers = np.array([[0.0] * 10,
                            [20.0] + [0.0] * 9,
                            [0.0, 20.0] + [0.0] * 8])
        x = np.vstack([rng.normal(c, 1.0, size=(30, 10)) for c in centers])
        labels = np.repeat([0, 1, 2], 30)
        config = TsneConfig(perplexity=10.0, theta=0.0, seed=2)
        result = af.tsne_embed(x, config)
        t = trustworthiness(x, result.coords, 10)
        s = silhouette(result.coords, labels)
        assert t >= 0.95, f"trustworthiness {t:.4f} < 0.95"
        assert s >= 0.5, f"silhouette {s:.4f} < 0.5"
        again = af.tsne_embed(x, config)
        assert result.coords.tobytes() == again.coords.tobytes()
        elapsed = time.perf_counter() - start
        assert elapsed < 60.0
        report_pass(
            f"t-SNE structure recovery (T={t:.3f}, S={s:.3f})", elapsed)

    def test_barnes_hut_fidelity(self):
        """theta=0.2 gradient within 5% relative L2 of the exact gradient
        for n=200 random configurations."""
        start = time.perf_counter()
        worst = 0.0
        for trial in range(10):
            rng = np.random.default_rng(9000 + trial)
            x = rng.normal(0.0, 1.0, size=(200, 6))
            p = af.pairwise_affinities(x, 30.0)
            y = rng.normal(0.0, 5.0, size=(200, 2))
            exact = af.tsne_gradient(p, y)
            approx = af.barnes_hut_gradient(p, y, 0.2)
            rel = np.linalg.norm(approx - exact) / np.linalg.norm(exact)
            worst = max(worst, rel)
            assert rel <= 0.05
        elapsed = time.perf_counter() - start
        report_pass(
            f"Barnes-Hut fidelity (worst {worst * 100:.2f}% of 5%)", elapsed)

    def test_zero_noise_synthetic_dataset(self):
        """noise=0: no confusion errors, perfect metrics and mAP, all Joint
        petals TP/TN, all center-dot distances zero."""
        ds = af.generate_synthetic(n=80, k=17, d=24, n_clusters=4,
                                   noise=0.0, seed=13)
        c = af.confusion(ds.records)
        assert c.fp == 0 and c.fn == 0
        r = af.report(c)
        assert r.precision == 1.0 and r.recall == 1.0 and r.f1 == 1.0
        assert af.mean_average_precision(ds) == pytest.approx(1.0, abs=1e-12)
        indices = list(range(ds.schema.k))
        for record in ds.records:
            glyph = layout_flower(record, ds.schema, indices,
                                  FlowerMode.JOINT, max_distance=0.0)
            assert glyph.center_dot.value == 0.0
            for petal in glyph.petals:
                state = (petal.fill is not None, petal.border)
                assert state in {(True, BLACK), (False, TN_OUTLINE)}, \
                    f"petal {petal.attribute_index} is not TP/TN"
        report_pass("zero-noise synthetic dataset")

    def test_glyph_encoding_table(self):
        """(act in {0,1}) x (prd in {0.0, 0.49, 0.5, 1.0}) yields exactly
        the four visual states and agrees with classify_outcome."""
        schema = af.AttributeSchema.default(1)
        expected_state = {
            Outcome.TP: (True, BLACK),
            Outcome.FN: (True, None),
            Outcome.FP: (False, BLACK),
            Outcome.TN: (False, TN_OUTLINE),
        }
        seen = set()
        for act in (0, 1):
            for prd in (0.0, 0.49, 0.5, 1.0):
                record = af.ImageRecord(id="probe", act=np.array([act]),
                                        prd=np.array([float(prd)]),
                                        fea=np.zeros(2, dtype=np.float32))
                glyph = layout_flower(record, schema, [0], FlowerMode.JOINT,
                                      max_distance=1.0)
                petal = glyph.petals[0]
                outcome = af.classify_outcome(act, prd, 0.5)
                state = (petal.fill is not None, petal.border)
                assert state == expected_state[outcome], (act, prd, outcome)
                seen.add(state)
        assert len(seen) == 4, "the four outcome states must be distinct"
        report_pass("glyph encoding table (8 combinations, 4 states)")

    def test_service_contract_end_to_end(self, tmp_path):
        """gen-synthetic -> upload -> embed all three spaces -> polygon
        selection -> selection metrics equals direct library computation;
        thumbnails and detail outcomes consistent; < 2 min."""
        start = time.perf_counter()

        manifest = tmp_path / "e2e.json"
        gen = subprocess.run(
            [sys.executable, "-m", "attrflower.cli", "gen-synthetic",
             "--n", "90", "--k", "8", "--d", "32", "--clusters", "3",
             "--noise", "0.15", "--seed", "23", "--out", str(manifest)],
            capture_output=True, text=True)
        assert gen.returncode == 0, gen.stderr
        ds = af.load_manifest(manifest)

        app = create_app(data_dir=tmp_path, cache_dir=tmp_path / "cache")
        with TestClient(app) as client:
            dataset_id = client.post(
                "/datasets", json={"path": str(manifest)}).json()["id"]
            assert dataset_id == ds.content_hash()[:12]

            coords = {}
            for space in ("act", "prd", "fea"):
                resp = client.post(
                    f"/datasets/{dataset_id}/embeddings",
                    json={"space": space,
                          "config": {"perplexity": 10.0, "n_iter": 250,
                                     "seed": 4}})
                assert resp.status_code in (200, 202), resp.text
                job_id = resp.json()["job_id"]
                deadline = time.time() + 60
                while time.time() < deadline:
                    payload = client.get(
                        f"/datasets/{dataset_id}/embeddings/{job_id}").json()
                    if payload["status"] in ("done", "error"):
                        break
                    time.sleep(0.05)
                assert payload["status"] == "done", payload
                coords[space] = np.asarray(payload["result"]["coords"])
                assert coords[space].shape == (len(ds), 2)

            session_id = client.post(
                "/sessions", json={"dataset_id": dataset_id}).json()["id"]

            # polygon = left-of-median half plane in the FEA embedding
            fea = coords["fea"]
            xm = float(np.median(fea[:, 0]))
            lo = fea.min(axis=0) - 1.0
            hi = fea.max(axis=0) + 1.0
            polygon = [[lo[0], lo[1]], [xm, lo[1]], [xm, hi[1]], [lo[0], hi[1]]]
            sel = client.post(
                f"/sessions/{session_id}/selections",
                json={"polygon": polygon, "space": "fea"}).json()
            inside = (fea[:, 0] <= xm) & (fea[:, 0] >= lo[0])
            expected_ids = [rid for rid, keep in zip(ds.ids, inside) if keep]
            assert sel["record_ids"] == expected_ids
            assert 0 < len(expected_ids) < len(ds)

            payload = client.get(
                f"/sessions/{session_id}/selections/{sel['id']}/metrics").json()
            records = [ds.record_by_id(r) for r in sel["record_ids"]]
            c = af.confusion(records, None, 0.5)
            assert payload["confusion"] == c.to_json()
            assert payload["report"] == af.report(c).to_json()

            # detail outcomes and thumbnails for a few records
            for rid in sel["record_ids"][:5]:
                detail = client.get(
                    f"/datasets/{dataset_id}/records/{rid}").json()
                record = ds.record_by_id(rid)
                for entry in detail["attributes"]:
                    expected = af.classify_outcome(
                        int(record.act[entry["index"]]),
                        float(record.prd[entry["index"]]), 0.5)
                    assert entry["outcome"] == expected.value
                thumb = client.get(detail["image_url"])
                assert thumb.status_code == 200
                assert thumb.headers["content-type"].startswith("image/")

            # glyph scene consistent with outcomes on the same threshold
            glyphs = client.get(
                f"/datasets/{dataset_id}/glyphs",
                params={"space": "fea", "mode": "joint"}).json()["glyphs"]
            assert [g["center"] for g in glyphs] == fea.tolist()

        elapsed = time.perf_counter() - start
        assert elapsed < 120.0
        report_pass("service contract end-to-end", elapsed)

    def test_cli_determinism(self, tmp_path):
        """embed run twice in separate processes -> byte-identical JSON;
        export-svg byte-identical."""
        start = time.perf_counter()
        manifest = tmp_path / "det.json"
        gen = subprocess.run(
            [sys.executable, "-m", "attrflower.cli", "gen-synthetic",
             "--n", "25", "--k", "6", "--d", "12", "--clusters", "2",
             "--noise", "0.2", "--seed", "31", "--out", str(manifest)],
            capture_output=True, text=True)
        assert gen.returncode == 0, gen.stderr

        embed_args = [sys.executable, "-m", "attrflower.cli", "embed",
                      "--manifest", str(manifest), "--space", "prd",
                      "--perplexity", "5", "--n-iter", "120", "--seed", "8"]
        first = subprocess.run(embed_args + ["--out", str(tmp_path / "e1.json")],
                               capture_output=True, text=True)
        second = subprocess.run(embed_args + ["--out", str(tmp_path / "e2.json")],
                                capture_output=True, text=True)
        assert first.returncode == 0 and second.returncode == 0
        e1 = (tmp_path / "e1.json").read_bytes()
        e2 = (tmp_path / "e2.json").read_bytes()
        assert e1 == e2

        svg_args = [sys.executable, "-m", "attrflower.cli", "export-svg",
                    "--manifest", str(manifest),
                    "--embedding", str(tmp_path / "e1.json"),
                    "--mode", "joint"]
        subprocess.run(svg_args + ["--out", str(tmp_path / "s1.svg")],
                       capture_output=True, check=True)
        subprocess.run(svg_args + ["--out", str(tmp_path / "s2.svg")],
                       capture_output=True, check=True)
        assert (tmp_path / "s1.svg").read_bytes() == (tmp_path / "s2.svg").read_bytes()
        elapsed = time.perf_counter() - start
        report_pass("CLI determinism (embed and export-svg)", elapsed)
