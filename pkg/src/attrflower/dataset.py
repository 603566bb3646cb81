"""Data model and I/O for multi-attribute image classification datasets.

A dataset couples an attribute schema (ordered attribute names plus display
colors) with per-image records: the ground-truth attribute vector ``act``
(K binary values), the model prediction vector ``prd`` (K probabilities) and
the deep feature vector ``fea`` (D non-negative activations, D=2048 by
convention). Datasets are read from a JSON manifest with an optional binary
feature sidecar, written back out, or generated synthetically for desk-scale
testing and demos.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ArgumentError, IoError, ParseError, SchemaError

# Named attributes of the default schema; wider schemas pad the remainder
# with numbered placeholders.
NAMED_ATTRIBUTES = (
    "SAXS",
    "WAXS",
    "halo",
    "ring",
    "Circular Beamstop",
    "High Background",
    "linear beam stop",
    "beam off image",
    "diffuse scattering",
)

DEFAULT_K = 17
DEFAULT_FEA_DIM = 2048

# Categorical palette (tab20); cycled when a schema needs more colors.
_PALETTE = (
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
    "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
    "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
    "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
)

_HEX_COLOR = re.compile(r"#[0-9a-fA-F]{6}(?:[0-9a-fA-F]{2})?")


def default_attribute_names(k: int) -> tuple[str, ...]:
    """Named attributes first, then ``attrN`` placeholders up to length k."""
    if k < 1:
        raise ArgumentError(f"attribute count must be >= 1, got {k}")
    names = list(NAMED_ATTRIBUTES[:k])
    names += [f"attr{i + 1}" for i in range(len(names), k)]
    return tuple(names)


def default_colors(k: int) -> tuple[str, ...]:
    return tuple(_PALETTE[i % len(_PALETTE)] for i in range(k))


@dataclass(frozen=True, eq=False)
class AttributeSchema:
    """Ordered attribute names with one display color per attribute."""

    names: tuple[str, ...]
    colors: tuple[str, ...]

    def __post_init__(self) -> None:
        names = tuple(self.names)
        colors = tuple(self.colors)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "colors", colors)
        if len(names) < 1:
            raise SchemaError("schema needs at least one attribute")
        if any(not isinstance(n, str) or not n for n in names):
            raise SchemaError("attribute names must be non-empty strings")
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if len(colors) != len(names):
            raise SchemaError(
                f"{len(colors)} colors for {len(names)} attributes"
            )
        for c in colors:
            if not isinstance(c, str) or not _HEX_COLOR.fullmatch(c):
                raise SchemaError(f"not an sRGB hex color: {c!r}")

    @property
    def k(self) -> int:
        return len(self.names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttributeSchema):
            return NotImplemented
        return self.names == other.names and self.colors == other.colors

    @classmethod
    def default(cls, k: int = DEFAULT_K) -> "AttributeSchema":
        return cls(default_attribute_names(k), default_colors(k))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ImageRecord:
    """One image: id, optional thumbnail path, and its ACT/PRD/FEA vectors."""

    id: str
    act: np.ndarray
    prd: np.ndarray
    fea: np.ndarray
    image_path: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise SchemaError("record id must be a non-empty string")
        act = np.asarray(self.act)
        prd = np.asarray(self.prd, dtype=np.float64)
        fea = np.asarray(self.fea, dtype=np.float32)
        if act.ndim != 1 or prd.ndim != 1 or fea.ndim != 1:
            raise SchemaError(f"record {self.id}: vectors must be 1-D")
        if not np.isin(act, (0, 1)).all():
            raise SchemaError(f"record {self.id}: act entries must be 0 or 1")
        act = act.astype(np.uint8)
        if not (np.isfinite(prd).all() and (prd >= 0.0).all() and (prd <= 1.0).all()):
            raise SchemaError(f"record {self.id}: prd entries must be in [0, 1]")
        if not np.isfinite(fea).all():
            raise SchemaError(f"record {self.id}: fea entries must be finite")
        object.__setattr__(self, "act", _readonly(act))
        object.__setattr__(self, "prd", _readonly(prd))
        object.__setattr__(self, "fea", _readonly(fea))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageRecord):
            return NotImplemented
        return (
            self.id == other.id
            and self.image_path == other.image_path
            and np.array_equal(self.act, other.act)
            and np.array_equal(self.prd, other.prd)
            and np.array_equal(self.fea, other.fea)
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable collection of records conforming to one schema.

    Safe to share across threads; all mutation-like operations return new
    objects.
    """

    schema: AttributeSchema
    records: tuple[ImageRecord, ...]
    fea_dim: int

    def __post_init__(self) -> None:
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        if self.fea_dim < 1:
            raise SchemaError(f"fea_dim must be positive, got {self.fea_dim}")
        k = self.schema.k
        seen: set[str] = set()
        for rec in records:
            if rec.id in seen:
                raise SchemaError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)
            if rec.act.shape[0] != k:
                raise SchemaError(
                    f"record {rec.id}: act has length {rec.act.shape[0]}, schema has {k}"
                )
            if rec.prd.shape[0] != k:
                raise SchemaError(
                    f"record {rec.id}: prd has length {rec.prd.shape[0]}, schema has {k}"
                )
            if rec.fea.shape[0] != self.fea_dim:
                raise SchemaError(
                    f"record {rec.id}: fea has length {rec.fea.shape[0]}, dataset declares {self.fea_dim}"
                )

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.fea_dim == other.fea_dim
            and len(self.records) == len(other.records)
            and all(a == b for a, b in zip(self.records, other.records))
        )

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.records)

    def record_by_id(self, record_id: str) -> ImageRecord:
        for rec in self.records:
            if rec.id == record_id:
                return rec
        raise KeyError(record_id)

    def act_matrix(self, dtype=np.float64) -> np.ndarray:
        if not self.records:
            return np.zeros((0, self.schema.k), dtype=dtype)
        return np.stack([r.act for r in self.records]).astype(dtype)

    def prd_matrix(self) -> np.ndarray:
        if not self.records:
            return np.zeros((0, self.schema.k))
        return np.stack([r.prd for r in self.records])

    def fea_matrix(self, dtype=np.float64) -> np.ndarray:
        if not self.records:
            return np.zeros((0, self.fea_dim), dtype=dtype)
        return np.stack([r.fea for r in self.records]).astype(dtype)

    def content_hash(self) -> str:
        """Hex digest of the full dataset content (schema + all vectors).

        FEA bytes are hashed at their stored float32 precision, so two
        datasets hash equal iff they round-trip bit-exactly.
        """
        h = hashlib.sha256()
        h.update(json.dumps(
            {"names": self.schema.names, "colors": self.schema.colors,
             "fea_dim": self.fea_dim},
            sort_keys=True).encode())
        for rec in self.records:
            h.update(rec.id.encode())
            h.update(b"\x00")
            h.update((rec.image_path or "").encode())
            h.update(b"\x00")
            h.update(rec.act.tobytes())
            h.update(rec.prd.tobytes())
            h.update(rec.fea.astype("<f4").tobytes())
        return h.hexdigest()


# ---------------------------------------------------------------------------
# Manifest I/O
#
# Manifest JSON:
#   {"fea_dim": int, "attributes": [str], "colors": [str]?, "fea_file": str?,
#    "images": [{"id": str, "path": str?, "act": [0|1 xK], "prd": [float xK],
#                "fea": [float xD]?}]}
# Exactly one of fea_file / per-record fea must be present. The sidecar is
# headerless: n x D little-endian 32-bit floats, row-major, manifest order.
# ---------------------------------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def parse_manifest(doc: Any, base_dir: Path | str | None = None) -> Dataset:
    """Build a validated Dataset from an already-decoded manifest object.

    ``base_dir`` anchors the relative ``fea_file`` path; it defaults to the
    current directory.
    """
    base = Path(base_dir) if base_dir is not None else Path(".")
    _require(isinstance(doc, dict), "manifest root must be a JSON object")
    _require("fea_dim" in doc, "manifest is missing 'fea_dim'")
    _require("attributes" in doc, "manifest is missing 'attributes'")
    _require("images" in doc, "manifest is missing 'images'")

    fea_dim = doc["fea_dim"]
    _require(isinstance(fea_dim, int) and not isinstance(fea_dim, bool) and fea_dim >= 1,
             f"fea_dim must be a positive integer, got {fea_dim!r}")
    attributes = doc["attributes"]
    _require(isinstance(attributes, list), "'attributes' must be a list")
    colors = doc.get("colors")
    if colors is None:
        colors = list(default_colors(len(attributes))) if attributes else []
    _require(isinstance(colors, list), "'colors' must be a list")
    schema = AttributeSchema(tuple(attributes), tuple(colors))

    images = doc["images"]
    _require(isinstance(images, list), "'images' must be a list")
    n = len(images)

    fea_file = doc.get("fea_file")
    inline_count = sum(1 for img in images if isinstance(img, dict) and "fea" in img)
    if fea_file is not None:
        _require(inline_count == 0,
                 "manifest declares fea_file, so records must not carry inline fea")
    else:
        _require(inline_count == n,
                 "manifest without fea_file must carry fea on every record")

    fea_rows: np.ndarray | None = None
    if fea_file is not None:
        _require(isinstance(fea_file, str) and fea_file, "'fea_file' must be a path string")
        sidecar = base / fea_file
        try:
            raw = sidecar.read_bytes()
        except OSError as exc:
            raise IoError(f"cannot read feature sidecar {sidecar}: {exc}") from exc
        expected = n * fea_dim * 4
        _require(len(raw) == expected,
                 f"feature sidecar {sidecar} holds {len(raw)} bytes, expected {expected}")
        fea_rows = np.frombuffer(raw, dtype="<f4").reshape(n, fea_dim).copy()

    records = []
    for i, img in enumerate(images):
        _require(isinstance(img, dict), f"images[{i}] must be an object")
        _require("id" in img, f"images[{i}] is missing 'id'")
        _require("act" in img and isinstance(img["act"], list),
                 f"images[{i}] is missing list 'act'")
        _require("prd" in img and isinstance(img["prd"], list),
                 f"images[{i}] is missing list 'prd'")
        path = img.get("path")
        _require(path is None or isinstance(path, str), f"images[{i}]: 'path' must be a string")
        try:
            fea = fea_rows[i] if fea_rows is not None else np.asarray(img["fea"], dtype=np.float32)
            rec = ImageRecord(id=img["id"], act=np.asarray(img["act"]),
                              prd=np.asarray(img["prd"], dtype=np.float64),
                              fea=fea, image_path=path)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"images[{i}]: {exc}") from exc
        records.append(rec)

    return Dataset(schema=schema, records=tuple(records), fea_dim=fea_dim)


def load_manifest(path: Path | str) -> Dataset:
    """Load and validate a dataset manifest from disk.

    Raises ParseError for malformed JSON, SchemaError for invariant
    violations, IoError for missing files. Record order is preserved.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read manifest {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest {path} is not valid JSON: {exc}") from exc
    return parse_manifest(doc, base_dir=path.parent)


def manifest_document(dataset: Dataset, fea_file: str | None = None) -> dict:
    """The manifest object for a dataset; fea inline unless fea_file is given."""
    images = []
    for rec in dataset.records:
        img: dict[str, Any] = {"id": rec.id}
        if rec.image_path is not None:
            img["path"] = rec.image_path
        img["act"] = [int(v) for v in rec.act]
        img["prd"] = [float(v) for v in rec.prd]
        if fea_file is None:
            img["fea"] = [float(v) for v in rec.fea]
        images.append(img)
    doc: dict[str, Any] = {
        "fea_dim": dataset.fea_dim,
        "attributes": list(dataset.schema.names),
        "colors": list(dataset.schema.colors),
    }
    if fea_file is not None:
        doc["fea_file"] = fea_file
    doc["images"] = images
    return doc


def save_manifest(dataset: Dataset, path: Path | str,
                  fea_file: str | None = None) -> Path:
    """Write a dataset manifest (and sidecar when ``fea_file`` is given).

    ``fea_file`` is stored and resolved relative to the manifest directory.
    Output is deterministic: identical datasets produce identical bytes.
    """
    path = Path(path)
    doc = manifest_document(dataset, fea_file=fea_file)
    if fea_file is not None:
        rows = dataset.fea_matrix(dtype=np.float32).astype("<f4")
        (path.parent / fea_file).write_bytes(rows.tobytes())
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Synthetic datasets
# ---------------------------------------------------------------------------


def generate_synthetic(n: int, k: int = DEFAULT_K, d: int = DEFAULT_FEA_DIM,
                       n_clusters: int = 5, noise: float = 0.1,
                       seed: int = 0) -> Dataset:
    """Generate a clustered synthetic dataset, deterministic in ``seed``.

    Each cluster gets a fixed random attribute pattern (its members' ACT) and
    a Gaussian blob of FEA activations clipped to >= 0. PRD starts as an exact
    copy of ACT; each entry is independently replaced, with probability
    ``noise``, by a uniform draw in [0, 1]. At noise=0 PRD equals ACT exactly.
    """
    if n < 0:
        raise ArgumentError(f"n must be >= 0, got {n}")
    if k < 1:
        raise ArgumentError(f"k must be >= 1, got {k}")
    if d < 2:
        raise ArgumentError(f"d must be >= 2, got {d}")
    if not (0.0 <= noise <= 1.0):
        raise ArgumentError(f"noise must be in [0, 1], got {noise}")
    if n > 0 and not (1 <= n_clusters <= n):
        raise ArgumentError(f"n_clusters must be in [1, {n}], got {n_clusters}")

    schema = AttributeSchema(default_attribute_names(k), default_colors(k))
    if n == 0:
        return Dataset(schema=schema, records=(), fea_dim=d)

    rng = np.random.default_rng(seed)
    patterns = rng.integers(0, 2, size=(n_clusters, k), dtype=np.uint8)
    centers = rng.uniform(0.5, 4.0, size=(n_clusters, d))
    # Balanced, shuffled cluster assignment: sizes differ by at most one.
    assign = rng.permutation(np.arange(n) % n_clusters)

    fea = centers[assign] + rng.normal(0.0, 0.25, size=(n, d))
    fea = np.clip(fea, 0.0, None).astype(np.float32)
    act = patterns[assign]
    corrupt = rng.random((n, k)) < noise
    uniform = rng.uniform(0.0, 1.0, size=(n, k))
    prd = np.where(corrupt, uniform, act.astype(np.float64))

    width = max(4, len(str(max(n - 1, 0))))
    records = tuple(
        ImageRecord(id=f"img-{i:0{width}d}", act=act[i], prd=prd[i], fea=fea[i])
        for i in range(n)
    )
    return Dataset(schema=schema, records=records, fea_dim=d)
