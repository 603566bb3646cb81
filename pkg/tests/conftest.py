"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from attrflower import AttributeSchema, Dataset, ImageRecord


def make_record(rid, act, prd, fea=None, image_path=None):
    if fea is None:
        fea = np.zeros(4, dtype=np.float32)
    return ImageRecord(id=rid, act=np.asarray(act), prd=np.asarray(prd, dtype=float),
                       fea=np.asarray(fea, dtype=np.float32), image_path=image_path)


def make_dataset(acts, prds, k=None, fea_dim=4):
    acts = [list(a) for a in acts]
    prds = [list(p) for p in prds]
    k = k if k is not None else (len(acts[0]) if acts else 2)
    schema = AttributeSchema.default(k)
    records = tuple(
        make_record(f"r{i}", a, p, np.zeros(fea_dim, dtype=np.float32))
        for i, (a, p) in enumerate(zip(acts, prds))
    )
    return Dataset(schema=schema, records=records, fea_dim=fea_dim)


@pytest.fixture
def tiny_dataset():
    return make_dataset(acts=[[1, 0], [0, 1]], prds=[[0.9, 0.1], [0.6, 0.6]])


def random_dataset(rng, n_max=50, k_max=5):
    """Random small dataset for oracle-equivalence checks."""
    n = int(rng.integers(0, n_max + 1))
    k = int(rng.integers(1, k_max + 1))
    acts = rng.integers(0, 2, size=(n, k))
    prds = rng.random((n, k))
    # sprinkle exact-threshold and extreme values so ties get exercised
    mask = rng.random((n, k)) < 0.15
    prds[mask] = rng.choice([0.0, 0.5, 1.0], size=int(mask.sum()))
    return make_dataset(acts.tolist(), prds.tolist(), k=k)
