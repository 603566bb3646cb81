"""Deterministic 2-D t-SNE for the ACT / PRD / FEA vector spaces.

A from-scratch implementation of t-SNE: Gaussian conditional affinities with
a per-point bandwidth found by binary search on Shannon perplexity,
symmetrized to a joint distribution P; a Student-t low-dimensional kernel;
and gradient descent with momentum, per-dimension adaptive gains and an
early-exaggeration phase. The repulsive gradient term is computed exactly
(theta = 0) or approximated by a Barnes-Hut quadtree (theta in (0, 1]).

Everything is deterministic given the input vectors and the config: the
initial layout is drawn from the config seed, and no step introduces
nondeterministic ordering. Identical (vectors, config) pairs produce
bit-identical coordinates, in and across processes.

Binary label vectors routinely contain exact duplicates, so a tiny
index-derived jitter separates coincident points before the bandwidth
search; rows that remain indistinguishable (the jitter underflows against
huge coordinates) raise DegenerateInput.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping

import numpy as np

from .dataset import Dataset
from .errors import ArgumentError, DegenerateInput
from .quadtree import QuadTree

JITTER_MAGNITUDE = 1e-10
BANDWIDTH_SEARCH_STEPS = 50
BANDWIDTH_LOG_TOL = 1e-5
KL_RECORD_EVERY = 50
INIT_SIGMA = 1e-4
MIN_GAIN = 0.01

_TINY = np.finfo(np.float64).tiny


class Space(Enum):
    ACT = "act"
    PRD = "prd"
    FEA = "fea"


@dataclass(frozen=True)
class TsneConfig:
    """Hyperparameters and seed for one t-SNE run.

    theta = 0 computes the exact O(n^2) gradient; theta in (0, 1] enables
    the Barnes-Hut approximation of the repulsive term. ``pca_predim``
    reduces the input with PCA first (used for the 2048-D FEA space).
    """

    perplexity: float = 30.0
    n_iter: int = 1000
    learning_rate: float = 200.0
    early_exaggeration_factor: float = 12.0
    early_exaggeration_iters: int = 250
    momentum_initial: float = 0.5
    momentum_final: float = 0.8
    momentum_switch_iter: int = 250
    theta: float = 0.0
    seed: int = 0
    pca_predim: int | None = None

    def __post_init__(self) -> None:
        if self.perplexity <= 0:
            raise ArgumentError(f"perplexity must be positive, got {self.perplexity}")
        if self.n_iter < 1:
            raise ArgumentError(f"n_iter must be positive, got {self.n_iter}")
        if self.learning_rate <= 0:
            raise ArgumentError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.early_exaggeration_factor <= 0:
            raise ArgumentError("early_exaggeration_factor must be positive, "
                                f"got {self.early_exaggeration_factor}")
        if self.early_exaggeration_iters < 0:
            raise ArgumentError("early_exaggeration_iters must be >= 0, "
                                f"got {self.early_exaggeration_iters}")
        for name in ("momentum_initial", "momentum_final"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0):
                raise ArgumentError(f"{name} must be in [0, 1), got {v}")
        if self.momentum_switch_iter < 0:
            raise ArgumentError("momentum_switch_iter must be >= 0, "
                                f"got {self.momentum_switch_iter}")
        if not (0.0 <= self.theta <= 1.0):
            raise ArgumentError(f"theta must be in [0, 1], got {self.theta}")
        if self.pca_predim is not None and self.pca_predim < 1:
            raise ArgumentError(f"pca_predim must be positive, got {self.pca_predim}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: Mapping) -> "TsneConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ArgumentError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    def content_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class EmbeddingResult:
    """2-D coordinates for one space plus the config and KL trace behind them."""

    space: Space | None
    coords: np.ndarray
    config: TsneConfig
    kl_trace: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ArgumentError(f"coords must be (n, 2), got {coords.shape}")
        if not np.isfinite(coords).all():
            raise ArgumentError("coords must be finite")
        trace = tuple((int(i), float(kl)) for i, kl in self.kl_trace)
        if any(kl < 0 for _, kl in trace):
            raise ArgumentError("KL divergence cannot be negative")
        coords = np.ascontiguousarray(coords)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "kl_trace", trace)

    def to_json(self) -> dict:
        return {
            "space": self.space.value if self.space is not None else None,
            "coords": [[float(x), float(y)] for x, y in self.coords],
            "config": self.config.to_json(),
            "kl_trace": [[i, kl] for i, kl in self.kl_trace],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "EmbeddingResult":
        space = Space(doc["space"]) if doc.get("space") else None
        coords = np.asarray(doc["coords"], dtype=np.float64).reshape(-1, 2)
        return cls(space=space, coords=coords,
                   config=TsneConfig.from_json(doc["config"]),
                   kl_trace=tuple((int(i), float(kl)) for i, kl in doc["kl_trace"]))


def save_embedding(result: EmbeddingResult, path: Path | str) -> Path:
    path = Path(path)
    path.write_text(json.dumps(result.to_json(), indent=1) + "\n", encoding="utf-8")
    return path


def load_embedding(path: Path | str) -> EmbeddingResult:
    return EmbeddingResult.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Distances and affinities
# ---------------------------------------------------------------------------


def squared_distances(x: np.ndarray, chunk_elems: int = 40_000_000) -> np.ndarray:
    """Pairwise squared Euclidean distances, computed from direct
    differences so that jitter-scale separations survive cancellation."""
    x = np.asarray(x, dtype=np.float64)
    n, m = x.shape
    d = np.empty((n, n), dtype=np.float64)
    rows_per_chunk = max(1, chunk_elems // max(1, n * m))
    for start in range(0, n, rows_per_chunk):
        stop = min(n, start + rows_per_chunk)
        diff = x[start:stop, None, :] - x[None, :, :]
        d[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d, 0.0)
    return d


def _affinity_distances(x: np.ndarray) -> np.ndarray:
    """Squared distances with exact duplicates separated by index jitter.

    Row i is nudged by JITTER_MAGNITUDE * (i + 1) / n in every coordinate.
    The jittered distances are used only where points coincide exactly, so
    genuine distance ties between distinct points stay exactly tied; the
    duplicate separations are second-order tiny and act as near-ties in the
    bandwidth search. Raises DegenerateInput when some row stays all-zero
    even after jitter (the nudge underflows against huge coordinates).
    """
    n = x.shape[0]
    offsets = JITTER_MAGNITUDE * (np.arange(n, dtype=np.float64) + 1.0) / n
    d_jittered = squared_distances(x + offsets[:, None])
    off = ~np.eye(n, dtype=bool)
    if (d_jittered[off].reshape(n, n - 1).max(axis=1) == 0.0).any():
        raise DegenerateInput(
            "some row has all-zero distances even after jitter")
    d = squared_distances(x)
    duplicates = off & (d == 0.0)
    if duplicates.any():
        d[duplicates] = d_jittered[duplicates]
    return d


def conditional_affinities(vectors: np.ndarray, perplexity: float) -> np.ndarray:
    """Row-stochastic conditional Gaussian affinities P(j|i).

    Each row's bandwidth is found by binary search so that the conditional
    distribution's Shannon perplexity matches the target (tolerance 1e-5 in
    the log domain, at most 50 bisection steps). Rows whose target is
    unattainable (for example duplicate-heavy rows, whose entropy cannot
    drop below the tie floor) keep their best-effort distribution. The
    diagonal is zero and every row sums to exactly 1.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2:
        raise ArgumentError(f"expected an (n, m) matrix, got shape {x.shape}")
    n = x.shape[0]
    if n < 2:
        raise ArgumentError(f"need at least 2 points, got {n}")
    if perplexity <= 0:
        raise ArgumentError(f"perplexity must be positive, got {perplexity}")
    if perplexity >= n:
        raise ArgumentError(f"perplexity {perplexity} must be < n = {n}")

    d = _affinity_distances(x)
    # Shift each row by its nearest-neighbor distance before exponentiating;
    # the softmax is shift-invariant and the nearest weight stays exp(0) = 1,
    # so the row sum never underflows no matter how large beta grows.
    off = ~np.eye(n, dtype=bool)
    row_min = np.where(off, d, np.inf).min(axis=1)
    d_shifted = np.maximum(d - row_min[:, None], 0.0)
    # Distances equal to the row minimum up to accumulated rounding noise
    # are ties; snap them so the search cannot split them at extreme beta.
    d_shifted[d_shifted < row_min[:, None] * 1e-13] = 0.0

    target = np.log(perplexity)
    beta = np.ones(n)
    beta_min = np.full(n, -np.inf)
    beta_max = np.full(n, np.inf)
    p = np.zeros((n, n))
    active = np.ones(n, dtype=bool)

    for _ in range(BANDWIDTH_SEARCH_STEPS):
        if not active.any():
            break
        rows = np.flatnonzero(active)
        w = np.exp(-d_shifted[rows] * beta[rows, None])
        w[np.arange(rows.size), rows] = 0.0
        sum_w = w.sum(axis=1)
        # Shannon entropy H = log(sum w) + beta * E[d]; perplexity = e^H.
        h = np.log(sum_w) + beta[rows] * (d_shifted[rows] * w).sum(axis=1) / sum_w
        p[rows] = w / sum_w[:, None]
        diff = h - target
        done = np.abs(diff) <= BANDWIDTH_LOG_TOL
        active[rows[done]] = False
        hot = rows[~done]
        if hot.size == 0:
            break
        high = diff[~done] > 0
        up = hot[high]          # entropy too high -> tighten kernel
        beta_min[up] = beta[up]
        beta[up] = np.where(np.isinf(beta_max[up]), beta[up] * 2.0,
                            (beta[up] + beta_max[up]) / 2.0)
        down = hot[~high]       # entropy too low -> widen kernel
        beta_max[down] = beta[down]
        beta[down] = np.where(np.isneginf(beta_min[down]), beta[down] / 2.0,
                              (beta[down] + beta_min[down]) / 2.0)
    return p


def pairwise_affinities(vectors: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized joint affinities P = (P(j|i) + P(i|j)) / 2n.

    Symmetric, non-negative, zero diagonal, total mass 1.
    """
    cond = conditional_affinities(vectors, perplexity)
    n = cond.shape[0]
    return (cond + cond.T) / (2.0 * n)


# ---------------------------------------------------------------------------
# Objective and gradients
# ---------------------------------------------------------------------------


def _student_t_kernel(y: np.ndarray) -> np.ndarray:
    num = 1.0 / (1.0 + squared_distances(y))
    np.fill_diagonal(num, 0.0)
    return num


def kl_divergence(p: np.ndarray, y: np.ndarray) -> float:
    """KL(P || Q) where Q is the normalized Student-t kernel of Y."""
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    num = _student_t_kernel(y)
    q = np.maximum(num / num.sum(), _TINY)
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def _check_gradient_shapes(p: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ArgumentError(f"P must be square, got {p.shape}")
    if y.ndim != 2 or y.shape[1] != 2:
        raise ArgumentError(f"Y must be (n, 2), got {y.shape}")
    if p.shape[0] != y.shape[0]:
        raise ArgumentError(f"P has {p.shape[0]} points, Y has {y.shape[0]}")
    return p, y


def tsne_gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exact dKL/dY for the Student-t formulation:
    grad_i = 4 * sum_j (p_ij - q_ij) * (1 + ||y_i - y_j||^2)^-1 * (y_i - y_j).
    """
    p, y = _check_gradient_shapes(p, y)
    num = _student_t_kernel(y)
    q = num / num.sum()
    w = (p - q) * num
    return 4.0 * (w.sum(axis=1)[:, None] * y - w @ y)


def barnes_hut_gradient(p: np.ndarray, y: np.ndarray, theta: float) -> np.ndarray:
    """Barnes-Hut gradient: exact attraction, quadtree-summarized repulsion.

    Cells whose side-to-distance ratio falls below theta contribute as a
    single super-point at their center of mass.
    """
    p, y = _check_gradient_shapes(p, y)
    if not (0.0 < theta <= 1.0):
        raise ArgumentError(f"theta must be in (0, 1] for Barnes-Hut, got {theta}")
    n = y.shape[0]
    if n < 2:
        raise ArgumentError("Barnes-Hut gradient needs at least 2 points")

    num = _student_t_kernel(y)
    w = p * num
    attract = w.sum(axis=1)[:, None] * y - w @ y

    tree = QuadTree(y)
    forces = np.empty((n, 2), dtype=np.float64)
    mass_total = 0.0
    for i in range(n):
        fx, fy, mass = tree.repulsion(y[i], theta)
        forces[i, 0] = fx
        forces[i, 1] = fy
        mass_total += mass
    mass_total -= n  # every traversal counts its own point once with q = 1
    repulse = forces / max(mass_total, _TINY)
    return 4.0 * (attract - repulse)


# ---------------------------------------------------------------------------
# PCA pre-reduction
# ---------------------------------------------------------------------------


def pca_reduce(x: np.ndarray, n_components: int) -> np.ndarray:
    """Deterministic PCA projection onto the top principal components.

    Component signs are canonicalized (largest-magnitude loading positive)
    so repeated runs agree bit-for-bit.
    """
    x = np.asarray(x, dtype=np.float64)
    if n_components < 1:
        raise ArgumentError(f"n_components must be positive, got {n_components}")
    centered = x - x.mean(axis=0)
    k = min(n_components, min(centered.shape))
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:k].copy()
    anchor = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(k), anchor])
    signs[signs == 0] = 1.0
    comps *= signs[:, None]
    return centered @ comps.T


# ---------------------------------------------------------------------------
# Optimization
# ---------------------------------------------------------------------------


def tsne_embed(vectors: np.ndarray, config: TsneConfig,
               space: Space | None = None) -> EmbeddingResult:
    """Embed an (n, m) matrix into 2-D, deterministically.

    A single point pins to the origin. The KL divergence against the plain
    (un-exaggerated) P is recorded every 50 iterations and at the final one.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2:
        raise ArgumentError(f"expected an (n, m) matrix, got shape {x.shape}")
    n = x.shape[0]
    if n < 1:
        raise ArgumentError("cannot embed an empty matrix")
    if n == 1:
        return EmbeddingResult(space=space, coords=np.zeros((1, 2)),
                               config=config, kl_trace=())
    if config.perplexity >= n:
        raise ArgumentError(
            f"perplexity {config.perplexity} must be < n = {n}")

    if config.pca_predim is not None and x.shape[1] > config.pca_predim:
        x = pca_reduce(x, config.pca_predim)

    p = pairwise_affinities(x, config.perplexity)

    rng = np.random.default_rng(config.seed)
    y = rng.normal(0.0, INIT_SIGMA, size=(n, 2))
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    p_exaggerated = p * config.early_exaggeration_factor

    trace: list[tuple[int, float]] = []
    for it in range(1, config.n_iter + 1):
        p_eff = p_exaggerated if it <= config.early_exaggeration_iters else p
        if config.theta == 0.0:
            grad = tsne_gradient(p_eff, y)
        else:
            grad = barnes_hut_gradient(p_eff, y, config.theta)

        momentum = (config.momentum_initial
                    if it <= config.momentum_switch_iter
                    else config.momentum_final)
        flip = (grad > 0.0) != (update > 0.0)
        gains[flip] += 0.2
        gains[~flip] *= 0.8
        np.clip(gains, MIN_GAIN, None, out=gains)
        update = momentum * update - config.learning_rate * gains * grad
        y = y + update
        y = y - y.mean(axis=0)

        if it % KL_RECORD_EVERY == 0 or it == config.n_iter:
            trace.append((it, kl_divergence(p, y)))

    return EmbeddingResult(space=space, coords=y, config=config,
                           kl_trace=tuple(trace))


# ---------------------------------------------------------------------------
# Per-space driver
# ---------------------------------------------------------------------------


def default_config(space: Space, n_points: int, fea_dim: int | None = None,
                   seed: int = 0) -> TsneConfig:
    """De-facto standard t-SNE settings adapted to the dataset size.

    Perplexity 30 clamped to (n - 1) / 3 for small n; Barnes-Hut (theta 0.5)
    above 2000 points; FEA inputs wider than 50 dims get PCA pre-reduction.
    """
    perplexity = 30.0
    if n_points >= 2:
        perplexity = min(perplexity, max(1.0, (n_points - 1) / 3.0))
    theta = 0.5 if n_points > 2000 else 0.0
    pca_predim = None
    if space is Space.FEA and fea_dim is not None and fea_dim > 50:
        pca_predim = 50
    return TsneConfig(perplexity=perplexity, theta=theta,
                      pca_predim=pca_predim, seed=seed)


def space_matrix(dataset: Dataset, space: Space) -> np.ndarray:
    """The raw vectors embedded for a space: binary ACT as reals, raw PRD
    probabilities (not thresholded), FEA activations."""
    space = Space(space)
    if space is Space.ACT:
        return dataset.act_matrix(dtype=np.float64)
    if space is Space.PRD:
        return dataset.prd_matrix()
    return dataset.fea_matrix(dtype=np.float64)


def embedding_cache_key(dataset_hash: str, space: Space, config: TsneConfig) -> str:
    blob = f"{dataset_hash}:{space.value}:{config.content_hash()}"
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


def embed_dataset_space(dataset: Dataset, space: Space,
                        config: TsneConfig | None = None,
                        cache_dir: Path | str | None = None) -> EmbeddingResult:
    """Embed one space of a dataset, optionally through a disk cache keyed
    by (dataset content hash, space, config)."""
    space = Space(space)
    if len(dataset) == 0:
        raise ArgumentError(f"{space.value}: cannot embed an empty dataset")
    if config is None:
        config = default_config(space, len(dataset), dataset.fea_dim)

    cache_path = None
    if cache_dir is not None:
        key = embedding_cache_key(dataset.content_hash(), space, config)
        cache_path = Path(cache_dir) / f"embedding-{key}.json"
        if cache_path.exists():
            return load_embedding(cache_path)

    try:
        result = tsne_embed(space_matrix(dataset, space), config, space=space)
    except (ArgumentError, DegenerateInput) as exc:
        raise type(exc)(f"{space.value}: {exc}") from exc

    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        save_embedding(result, cache_path)
    return result


def embed_all_spaces(dataset: Dataset,
                     configs: Mapping[Space, TsneConfig] | None = None,
                     cache_dir: Path | str | None = None,
                     seed: int = 0) -> dict[Space, EmbeddingResult]:
    """Embed ACT, PRD and FEA, returning one EmbeddingResult per space."""
    if len(dataset) == 0:
        raise ArgumentError("cannot embed an empty dataset")
    results: dict[Space, EmbeddingResult] = {}
    for space in Space:
        config = None if configs is None else configs.get(space)
        if config is None:
            config = default_config(space, len(dataset), dataset.fea_dim, seed=seed)
        results[space] = embed_dataset_space(dataset, space, config, cache_dir)
    return results
