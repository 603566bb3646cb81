"""HTTP service coordinating datasets, embeddings, selections and glyphs.

Serves the explorer UI (and scripted clients) over JSON/HTTP: upload or
reference dataset manifests, run embedding jobs asynchronously with a
content-hash disk cache, create polygon/rectangle/id selections against
embedded coordinates, and fetch per-selection confusion metrics, per-record
details, flower-glyph scenes and thumbnails.

Datasets and embedding results are immutable shared state; session
mutations serialize behind a per-session lock. Selection hit-testing runs
server-side in embedding coordinates (even-odd rule, boundary inclusive) so
every client agrees exactly.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import FileResponse

from . import dataset as ds_mod
from . import glyph as glyph_mod
from . import metrics as metrics_mod
from . import tsne as tsne_mod
from .errors import ArgumentError, IoError, ParseError, SchemaError
from .metrics import DistanceKind
from .tsne import EmbeddingResult, Space, TsneConfig

SELECTION_PALETTE = (
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
    "#ff7f00", "#a65628", "#f781bf", "#999999",
)

_MEDIA_TYPES = {
    ".png": "image/png", ".jpg": "image/jpeg", ".jpeg": "image/jpeg",
    ".gif": "image/gif", ".svg": "image/svg+xml", ".tif": "image/tiff",
    ".tiff": "image/tiff", ".bmp": "image/bmp",
}


# ---------------------------------------------------------------------------
# Geometry: polygon hit-testing
# ---------------------------------------------------------------------------


def point_on_segment(p: tuple[float, float], a: tuple[float, float],
                     b: tuple[float, float]) -> bool:
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if cross != 0.0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def point_in_polygon(p: tuple[float, float],
                     polygon: list[tuple[float, float]]) -> bool:
    """Even-odd rule with boundary-inclusive semantics.

    Self-intersecting polygons are legal; the even-odd rule resolves them.
    """
    n = len(polygon)
    for i in range(n):
        if point_on_segment(p, polygon[i], polygon[(i + 1) % n]):
            return True
    inside = False
    px, py = p
    for i in range(n):
        ax, ay = polygon[i]
        bx, by = polygon[(i + 1) % n]
        if (ay > py) != (by > py):
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_cross:
                inside = not inside
    return inside


def select_in_polygon(coords: np.ndarray, ids: Iterable[str],
                      polygon: list[tuple[float, float]]) -> list[str]:
    return [rid for rid, xy in zip(ids, coords)
            if point_in_polygon((float(xy[0]), float(xy[1])), polygon)]


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------


@dataclass
class Selection:
    id: str
    record_ids: list[str]
    color: str
    created_from: str            # "lasso" | "rectangle" | "ids"
    source_space: str | None     # "act" | "prd" | "fea" | None for id lists

    def to_json(self) -> dict:
        return {"id": self.id, "record_ids": list(self.record_ids),
                "color": self.color, "created_from": self.created_from,
                "source_space": self.source_space}


@dataclass
class Session:
    id: str
    dataset_id: str
    attribute_filter: list[int]
    flower_mode: str = "joint"
    distance_kind: str = "euclidean"
    selections: dict[str, Selection] = field(default_factory=dict)
    selection_count: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "dataset_id": self.dataset_id,
            "attribute_filter": list(self.attribute_filter),
            "flower_mode": self.flower_mode,
            "distance_kind": self.distance_kind,
            "selections": [s.to_json() for s in self.selections.values()],
        }


@dataclass
class Job:
    id: str
    dataset_id: str
    space: Space
    config: TsneConfig
    key: str
    status: str = "running"      # running | done | error
    error: str | None = None
    computed: bool = False


class ServiceStore:
    """All mutable service state plus the worker pool for embedding jobs."""

    def __init__(self, data_dir: Path | str | None = None,
                 cache_dir: Path | str | None = None) -> None:
        self.data_dir = Path(data_dir) if data_dir else Path(".")
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.datasets: dict[str, ds_mod.Dataset] = {}
        self.dataset_dirs: dict[str, Path] = {}
        self.jobs: dict[str, Job] = {}
        self.jobs_by_key: dict[str, str] = {}
        self.embeddings: dict[str, EmbeddingResult] = {}   # by cache key
        self.current: dict[tuple[str, Space], str] = {}    # -> cache key
        self.sessions: dict[str, Session] = {}
        self.compute_count: dict[str, int] = {}
        self.lock = threading.Lock()
        self.executor = ThreadPoolExecutor(max_workers=2)

    # -- datasets ----------------------------------------------------------

    def add_dataset(self, dataset: ds_mod.Dataset, base_dir: Path) -> str:
        dataset_id = dataset.content_hash()[:12]
        with self.lock:
            if dataset_id not in self.datasets:
                self.datasets[dataset_id] = dataset
                self.dataset_dirs[dataset_id] = base_dir
        return dataset_id

    def get_dataset(self, dataset_id: str) -> ds_mod.Dataset:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise HTTPException(404, f"unknown dataset {dataset_id!r}")

    # -- embedding jobs ----------------------------------------------------

    def submit_embedding(self, dataset_id: str, space: Space,
                         config: TsneConfig) -> Job:
        dataset = self.get_dataset(dataset_id)
        key = tsne_mod.embedding_cache_key(dataset.content_hash(), space, config)
        with self.lock:
            existing_id = self.jobs_by_key.get(key)
            if existing_id is not None:
                existing = self.jobs[existing_id]
                if existing.status == "running":
                    raise HTTPException(
                        409, f"identical embedding job {existing.id} already running")
                if existing.status == "done":
                    return existing
            job = Job(id=uuid.uuid4().hex[:12], dataset_id=dataset_id,
                      space=space, config=config, key=key)
            self.jobs[job.id] = job
            self.jobs_by_key[key] = job.id
        self.executor.submit(self._run_job, job, dataset)
        return job

    def _run_job(self, job: Job, dataset: ds_mod.Dataset) -> None:
        try:
            result = None
            if self.cache_dir is not None:
                path = self.cache_dir / f"embedding-{job.key}.json"
                if path.exists():
                    result = tsne_mod.load_embedding(path)
            if result is None and job.key in self.embeddings:
                result = self.embeddings[job.key]
            if result is None:
                result = tsne_mod.embed_dataset_space(dataset, job.space, job.config)
                job.computed = True
                with self.lock:
                    self.compute_count[job.key] = self.compute_count.get(job.key, 0) + 1
                if self.cache_dir is not None:
                    self.cache_dir.mkdir(parents=True, exist_ok=True)
                    tsne_mod.save_embedding(result, self.cache_dir / f"embedding-{job.key}.json")
            with self.lock:
                self.embeddings[job.key] = result
                self.current[(job.dataset_id, job.space)] = job.key
            job.status = "done"
        except Exception as exc:  # job errors surface through polling
            job.error = f"{type(exc).__name__}: {exc}"
            job.status = "error"

    def current_embedding(self, dataset_id: str, space: Space) -> EmbeddingResult:
        with self.lock:
            key = self.current.get((dataset_id, space))
            if key is None or key not in self.embeddings:
                raise HTTPException(
                    404, f"no completed {space.value} embedding for dataset {dataset_id!r}")
            return self.embeddings[key]

    # -- sessions ----------------------------------------------------------

    def get_session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}")


# ---------------------------------------------------------------------------
# Request helpers
# ---------------------------------------------------------------------------


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(400, f"{type(exc).__name__}: {exc}")


async def _json_body(request: Request) -> Any:
    try:
        return await request.json()
    except Exception as exc:
        raise HTTPException(400, f"body is not valid JSON: {exc}")


def _parse_space(value: str) -> Space:
    try:
        return Space(value)
    except ValueError:
        raise HTTPException(400, f"unknown space {value!r}; expected act|prd|fea")


def _parse_attributes(raw: str | None, session_filter: list[int] | None,
                      k: int) -> list[int]:
    if raw is None or raw == "":
        if session_filter:
            return list(session_filter)
        return list(range(k))
    try:
        indices = sorted({int(tok) for tok in raw.split(",")})
    except ValueError:
        raise HTTPException(400, f"attributes must be comma-separated integers, got {raw!r}")
    if not indices or indices[0] < 0 or indices[-1] >= k:
        raise HTTPException(400, f"attribute indices out of range for k={k}: {indices}")
    return indices


def _placeholder_svg(record_id: str) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'width="128" height="128" viewBox="0 0 128 128">\n'
        '<rect width="128" height="128" fill="#e8e8e8" stroke="#999999"/>\n'
        '<line x1="0" y1="0" x2="128" y2="128" stroke="#cccccc"/>\n'
        '<line x1="128" y1="0" x2="0" y2="128" stroke="#cccccc"/>\n'
        f'<text x="64" y="68" font-size="10" text-anchor="middle" '
        f'fill="#666666">{record_id}</text>\n'
        "</svg>\n"
    )


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------


def create_app(data_dir: Path | str | None = None,
               cache_dir: Path | str | None = None) -> FastAPI:
    """Build the service application with its own isolated store."""
    app = FastAPI(title="attrflower service")
    store = ServiceStore(data_dir=data_dir, cache_dir=cache_dir)
    app.state.store = store

    try:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=["*"],
                           allow_methods=["*"], allow_headers=["*"])
    except ImportError:
        pass

    # -- datasets ---------------------------------------------------------

    @app.post("/datasets", status_code=201)
    async def upload_dataset(request: Request, response: Response):
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise HTTPException(400, "body must be a JSON object")
        try:
            if "images" not in body and "path" in body:
                path = Path(body["path"])
                if not path.is_absolute():
                    path = store.data_dir / path
                dataset = ds_mod.load_manifest(path)
                base_dir = path.parent
            else:
                dataset = ds_mod.parse_manifest(body, base_dir=store.data_dir)
                base_dir = store.data_dir
        except (SchemaError, ParseError, IoError) as exc:
            raise _bad_request(exc)
        existed = dataset.content_hash()[:12] in store.datasets
        dataset_id = store.add_dataset(dataset, base_dir)
        if existed:
            response.status_code = 200
        return {"id": dataset_id, "n_records": len(dataset),
                "k": dataset.schema.k, "fea_dim": dataset.fea_dim}

    @app.get("/datasets")
    def list_datasets():
        return [{"id": did, "n_records": len(d), "k": d.schema.k,
                 "fea_dim": d.fea_dim} for did, d in store.datasets.items()]

    @app.get("/datasets/{dataset_id}")
    def dataset_summary(dataset_id: str):
        dataset = store.get_dataset(dataset_id)
        return {
            "id": dataset_id,
            "n_records": len(dataset),
            "k": dataset.schema.k,
            "fea_dim": dataset.fea_dim,
            "attributes": list(dataset.schema.names),
            "colors": list(dataset.schema.colors),
            "record_ids": list(dataset.ids),
        }

    # -- embeddings --------------------------------------------------------

    @app.post("/datasets/{dataset_id}/embeddings", status_code=202)
    async def submit_embedding(dataset_id: str, request: Request, response: Response):
        dataset = store.get_dataset(dataset_id)
        body = await _json_body(request)
        if not isinstance(body, dict) or "space" not in body:
            raise HTTPException(400, "body must be an object with a 'space' field")
        space = _parse_space(body["space"])
        overrides = body.get("config") or {}
        if not isinstance(overrides, dict):
            raise HTTPException(400, "'config' must be an object")
        base = tsne_mod.default_config(space, len(dataset), dataset.fea_dim)
        try:
            config = replace(base, **overrides)
        except (TypeError, ArgumentError) as exc:
            raise _bad_request(exc)
        if len(dataset) == 0:
            raise HTTPException(400, "cannot embed an empty dataset")
        if len(dataset) >= 2 and config.perplexity >= len(dataset):
            raise HTTPException(
                400, f"perplexity {config.perplexity} must be < n = {len(dataset)}")
        job = store.submit_embedding(dataset_id, space, config)
        if job.status == "done":
            response.status_code = 200
        return {"job_id": job.id, "status": job.status, "space": space.value}

    @app.get("/datasets/{dataset_id}/embeddings/{job_id}")
    def poll_embedding(dataset_id: str, job_id: str):
        store.get_dataset(dataset_id)
        job = store.jobs.get(job_id)
        if job is None or job.dataset_id != dataset_id:
            raise HTTPException(404, f"unknown job {job_id!r}")
        payload: dict[str, Any] = {"job_id": job.id, "status": job.status,
                                   "space": job.space.value}
        if job.status == "done":
            payload["result"] = store.embeddings[job.key].to_json()
        if job.status == "error":
            payload["error"] = job.error
        return payload

    @app.get("/datasets/{dataset_id}/embeddings")
    def latest_embedding(dataset_id: str, space: str):
        store.get_dataset(dataset_id)
        return store.current_embedding(dataset_id, _parse_space(space)).to_json()

    # -- sessions and selections -------------------------------------------

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or "dataset_id" not in body:
            raise HTTPException(400, "body must be an object with 'dataset_id'")
        dataset = store.get_dataset(body["dataset_id"])
        session = Session(id=uuid.uuid4().hex[:12], dataset_id=body["dataset_id"],
                          attribute_filter=list(range(dataset.schema.k)))
        with store.lock:
            store.sessions[session.id] = session
        return session.to_json()

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str):
        return store.get_session(session_id).to_json()

    @app.patch("/sessions/{session_id}")
    async def update_session(session_id: str, request: Request):
        session = store.get_session(session_id)
        dataset = store.get_dataset(session.dataset_id)
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise HTTPException(400, "body must be a JSON object")
        with session.lock:
            if "attribute_filter" in body:
                flt = body["attribute_filter"]
                if (not isinstance(flt, list) or not flt
                        or any(not isinstance(i, int) or isinstance(i, bool) for i in flt)):
                    raise HTTPException(400, "attribute_filter must be a non-empty list of ints")
                flt = sorted(set(flt))
                if flt[0] < 0 or flt[-1] >= dataset.schema.k:
                    raise HTTPException(400, f"attribute_filter out of range for k={dataset.schema.k}")
                session.attribute_filter = flt
            if "flower_mode" in body:
                try:
                    session.flower_mode = glyph_mod.FlowerMode(body["flower_mode"]).value
                except ValueError:
                    raise HTTPException(400, f"unknown flower_mode {body['flower_mode']!r}")
            if "distance_kind" in body:
                try:
                    session.distance_kind = DistanceKind(body["distance_kind"]).value
                except ValueError:
                    raise HTTPException(400, f"unknown distance_kind {body['distance_kind']!r}")
        return session.to_json()

    @app.post("/sessions/{session_id}/selections", status_code=201)
    async def create_selection(session_id: str, request: Request):
        session = store.get_session(session_id)
        dataset = store.get_dataset(session.dataset_id)
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise HTTPException(400, "body must be a JSON object")

        source_space: str | None = None
        if "record_ids" in body:
            record_ids = body["record_ids"]
            if not isinstance(record_ids, list):
                raise HTTPException(400, "'record_ids' must be a list")
            known = set(dataset.ids)
            unknown = [r for r in record_ids if r not in known]
            if unknown:
                raise HTTPException(400, f"unknown record ids: {unknown[:5]}")
            ids = list(dict.fromkeys(record_ids))
            created_from = "ids"
            if "space" in body and body["space"] is not None:
                source_space = _parse_space(body["space"]).value
        elif "polygon" in body or "rect" in body:
            if "space" not in body:
                raise HTTPException(400, "polygon/rect selections need a 'space'")
            space = _parse_space(body["space"])
            source_space = space.value
            embedding = store.current_embedding(session.dataset_id, space)
            if "rect" in body:
                rect = body["rect"]
                if not (isinstance(rect, list) and len(rect) == 4):
                    raise HTTPException(400, "'rect' must be [xmin, ymin, xmax, ymax]")
                x0, y0, x1, y1 = (float(v) for v in rect)
                polygon = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
                created_from = "rectangle"
            else:
                poly = body["polygon"]
                if (not isinstance(poly, list) or len(poly) < 3
                        or any(not isinstance(pt, list) or len(pt) != 2 for pt in poly)):
                    raise HTTPException(400, "'polygon' must be a list of >= 3 [x, y] points")
                polygon = [(float(px), float(py)) for px, py in poly]
                created_from = "lasso"
            ids = select_in_polygon(embedding.coords, dataset.ids, polygon)
        else:
            raise HTTPException(400, "selection needs 'record_ids', 'polygon' or 'rect'")

        with session.lock:
            color = SELECTION_PALETTE[session.selection_count % len(SELECTION_PALETTE)]
            selection = Selection(id=f"sel-{session.selection_count}",
                                  record_ids=ids, color=color,
                                  created_from=created_from,
                                  source_space=source_space)
            session.selection_count += 1
            session.selections[selection.id] = selection
        return selection.to_json()

    @app.get("/sessions/{session_id}/selections")
    def list_selections(session_id: str):
        session = store.get_session(session_id)
        return [s.to_json() for s in session.selections.values()]

    @app.delete("/sessions/{session_id}/selections/{selection_id}", status_code=204)
    def delete_selection(session_id: str, selection_id: str):
        session = store.get_session(session_id)
        with session.lock:
            if selection_id not in session.selections:
                raise HTTPException(404, f"unknown selection {selection_id!r}")
            del session.selections[selection_id]
        return Response(status_code=204)

    @app.get("/sessions/{session_id}/selections/{selection_id}/metrics")
    def selection_metrics(session_id: str, selection_id: str,
                          attributes: str | None = None, threshold: float = 0.5):
        session = store.get_session(session_id)
        dataset = store.get_dataset(session.dataset_id)
        selection = session.selections.get(selection_id)
        if selection is None:
            raise HTTPException(404, f"unknown selection {selection_id!r}")
        indices = _parse_attributes(attributes, session.attribute_filter,
                                    dataset.schema.k)
        records = [dataset.record_by_id(rid) for rid in selection.record_ids]
        try:
            summary = metrics_mod.confusion(records, indices, threshold)
        except ArgumentError as exc:
            raise _bad_request(exc)
        return {"selection_id": selection_id,
                "attributes": indices,
                "confusion": summary.to_json(),
                "report": metrics_mod.report(summary).to_json()}

    # -- records, glyphs, thumbnails ----------------------------------------

    @app.get("/datasets/{dataset_id}/records/{record_id}")
    def record_detail(dataset_id: str, record_id: str, threshold: float = 0.5):
        dataset = store.get_dataset(dataset_id)
        try:
            record = dataset.record_by_id(record_id)
        except KeyError:
            raise HTTPException(404, f"unknown record {record_id!r}")
        try:
            attributes = [
                {"index": j,
                 "name": dataset.schema.names[j],
                 "color": dataset.schema.colors[j],
                 "act": int(record.act[j]),
                 "prd": float(record.prd[j]),
                 "outcome": metrics_mod.classify_outcome(
                     int(record.act[j]), float(record.prd[j]), threshold).value}
                for j in range(dataset.schema.k)
            ]
        except ArgumentError as exc:
            raise _bad_request(exc)
        return {
            "id": record.id,
            "image_url": f"/datasets/{dataset_id}/images/{record.id}",
            "has_image": record.image_path is not None,
            "act": [int(v) for v in record.act],
            "prd": [float(v) for v in record.prd],
            "fea": [float(v) for v in record.fea],
            "attributes": attributes,
            "distances": {
                "euclidean": metrics_mod.error_distance(
                    record.act, record.prd, DistanceKind.EUCLIDEAN),
                "cosine": metrics_mod.error_distance(
                    record.act, record.prd, DistanceKind.COSINE),
            },
        }

    @app.get("/datasets/{dataset_id}/glyphs")
    def glyph_scene(dataset_id: str, space: str, mode: str = "joint",
                    attributes: str | None = None, distance: str = "euclidean",
                    radius: float = 10.0):
        dataset = store.get_dataset(dataset_id)
        space_enum = _parse_space(space)
        embedding = store.current_embedding(dataset_id, space_enum)
        try:
            flower_mode = glyph_mod.FlowerMode(mode)
        except ValueError:
            raise HTTPException(400, f"unknown mode {mode!r}; expected act|prd|joint")
        try:
            kind = DistanceKind(distance)
        except ValueError:
            raise HTTPException(400, f"unknown distance {distance!r}")
        indices = _parse_attributes(attributes, None, dataset.schema.k)
        max_distance = 0.0
        if dataset.records:
            max_distance = max(
                metrics_mod.error_distance(r.act, r.prd, kind)
                for r in dataset.records)
        try:
            glyphs = [
                glyph_mod.layout_flower(
                    record, dataset.schema, indices, flower_mode,
                    distance_kind=kind, max_distance=max_distance,
                    center=(float(xy[0]), float(xy[1])), radius=radius)
                for record, xy in zip(dataset.records, embedding.coords)
            ]
        except ArgumentError as exc:
            raise _bad_request(exc)
        return {"space": space_enum.value, "mode": flower_mode.value,
                "distance": kind.value, "max_distance": max_distance,
                "attributes": indices,
                "glyphs": [g.to_json() for g in glyphs]}

    @app.get("/datasets/{dataset_id}/images/{record_id}")
    def thumbnail(dataset_id: str, record_id: str):
        dataset = store.get_dataset(dataset_id)
        try:
            record = dataset.record_by_id(record_id)
        except KeyError:
            raise HTTPException(404, f"unknown record {record_id!r}")
        if record.image_path is not None:
            path = store.dataset_dirs[dataset_id] / record.image_path
            if path.exists():
                media = _MEDIA_TYPES.get(path.suffix.lower(), "application/octet-stream")
                return FileResponse(path, media_type=media)
        return Response(content=_placeholder_svg(record.id),
                        media_type="image/svg+xml")

    # -- diagnostics ---------------------------------------------------------

    @app.get("/stats")
    def stats():
        with store.lock:
            return {
                "datasets": len(store.datasets),
                "sessions": len(store.sessions),
                "jobs": {j.id: j.status for j in store.jobs.values()},
                "embedding_computes": dict(store.compute_count),
            }

    return app


def save_session_snapshot(store: ServiceStore, session_id: str,
                          path: Path | str) -> Path:
    """Persist one session's state as JSON (optional snapshot support)."""
    session = store.sessions[session_id]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(session.to_json(), indent=1) + "\n",
                    encoding="utf-8")
    return path


def load_session_snapshot(store: ServiceStore, path: Path | str) -> Session:
    """Restore a snapshot written by save_session_snapshot."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    session = Session(id=doc["id"], dataset_id=doc["dataset_id"],
                      attribute_filter=list(doc["attribute_filter"]),
                      flower_mode=doc["flower_mode"],
                      distance_kind=doc["distance_kind"])
    for sel in doc["selections"]:
        session.selections[sel["id"]] = Selection(
            id=sel["id"], record_ids=list(sel["record_ids"]),
            color=sel["color"], created_from=sel["created_from"],
            source_space=sel.get("source_space"))
    session.selection_count = len(session.selections)
    store.sessions[session.id] = session
    return session
