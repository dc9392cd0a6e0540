"""Spherical K-Means and Affinity Propagation under cosine dissimilarity.

Both algorithms operate on L2-normalized rows, so positive rescaling of any
input row cannot change an assignment.  Determinism rules, fixed so tests can
compare runs exactly:

  * K-Means: k-means++ seeded from the config; nearest-centroid ties go to
    the lowest cluster id; empty clusters are reseeded with the point
    farthest from its current centroid.
  * AP: a constant-seeded, eps-scale jitter breaks message-passing ties
    between identical rows (otherwise R/A oscillate forever on duplicates);
    final assignments are computed on the clean similarities with
    lexicographic NP-key tie-breaks, so the jitter never shows downstream.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .matrices import Representation


@dataclass(frozen=True)
class Clustering:
    labels: tuple[str, ...]            # NP keys, row order of the clustered matrix
    assignment: dict[str, int]         # NP key -> cluster id in 0..n_clusters-1
    n_clusters: int
    algorithm: str
    centroids: np.ndarray | None = None        # K-Means only
    exemplars: dict[int, str] | None = None    # AP only: cluster id -> exemplar key
    objective: float | None = None
    objective_history: tuple[float, ...] = ()
    converged: bool = True

    def __post_init__(self) -> None:
        ids = set(self.assignment.values())
        if ids != set(range(self.n_clusters)):
            raise ValueError(f"cluster ids {sorted(ids)} are not 0..{self.n_clusters - 1}")
        if set(self.labels) != set(self.assignment):
            raise ValueError("assignment keys do not match labels")

    def cluster_ids(self) -> np.ndarray:
        """Ids in label order."""
        return np.array([self.assignment[lbl] for lbl in self.labels], dtype=int)

    def members(self) -> dict[int, tuple[str, ...]]:
        out: dict[int, list[str]] = {c: [] for c in range(self.n_clusters)}
        for lbl in self.labels:
            out[self.assignment[lbl]].append(lbl)
        return {c: tuple(ms) for c, ms in out.items()}


@dataclass(frozen=True)
class KmeansConfig:
    k: int
    seed: int = 0
    max_iter: int = 300
    rel_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.max_iter < 1 or self.rel_tol < 0:
            raise ValueError("max_iter must be >= 1 and rel_tol >= 0")


MEDIAN_PREFERENCE = "median"


@dataclass(frozen=True)
class ApConfig:
    preference: float | str = MEDIAN_PREFERENCE
    damping: float = 0.9
    max_iter: int = 1000
    convergence_window: int = 50

    def __post_init__(self) -> None:
        if not 0.5 <= self.damping < 1.0:
            raise ValueError(f"damping must be in [0.5, 1), got {self.damping}")
        if isinstance(self.preference, str) and self.preference != MEDIAN_PREFERENCE:
            raise ValueError(f"preference must be a real or '{MEDIAN_PREFERENCE}'")
        if self.max_iter < 1 or self.convergence_window < 1:
            raise ValueError("max_iter and convergence_window must be >= 1")


def cosine_dissimilarity(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cos(a, b), in [0, 2]; zero vectors are a caller error."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine dissimilarity undefined for a zero vector")
    return float(min(2.0, max(0.0, 1.0 - float(a @ b) / (na * nb))))


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        bad = np.flatnonzero(norms == 0.0)[:5]
        raise ValueError(f"all-zero rows at indices {bad.tolist()}; drop them before clustering")
    return matrix / norms[:, None]


def pairwise_cosine_dissimilarity(matrix: np.ndarray) -> np.ndarray:
    """Symmetric pairwise matrix with an exactly zero diagonal."""
    normalized = _normalize_rows(matrix)
    d = 1.0 - normalized @ normalized.T
    d = np.clip((d + d.T) / 2.0, 0.0, 2.0)
    np.fill_diagonal(d, 0.0)
    return d


def distinct_row_count(matrix: np.ndarray) -> int:
    """Number of distinct directions (unique L2-normalized rows)."""
    return int(np.unique(_normalize_rows(matrix), axis=0).shape[0])


def _kmeanspp_init(normalized: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = normalized.shape[0]
    centroids = np.empty((k, normalized.shape[1]))
    centroids[0] = normalized[rng.integers(n)]
    nearest = 1.0 - normalized @ centroids[0]
    for c in range(1, k):
        weights = np.clip(nearest, 0.0, None) ** 2
        total = weights.sum()
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=weights / total))
        centroids[c] = normalized[idx]
        nearest = np.minimum(nearest, 1.0 - normalized @ centroids[c])
    return centroids


def _assign(normalized: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # argmin returns the first (lowest id) among tied centroids
    return np.argmin(1.0 - normalized @ centroids.T, axis=1)


def _repair_empty(normalized: np.ndarray, labels: np.ndarray,
                  centroids: np.ndarray) -> bool:
    """Reseed each empty cluster with the point farthest from its assigned
    centroid; mutates labels and centroids.  Returns whether anything moved."""
    k = centroids.shape[0]
    repaired = False
    for c in range(k):
        if np.any(labels == c):
            continue
        dissim = 1.0 - np.einsum("ij,ij->i", normalized, centroids[labels])
        counts = np.bincount(labels, minlength=k)
        # never steal the sole member of another cluster
        dissim[counts[labels] <= 1] = -np.inf
        p = int(np.argmax(dissim))
        labels[p] = c
        centroids[c] = normalized[p]
        repaired = True
    return repaired


def _objective(normalized: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    return float(np.sum(1.0 - np.einsum("ij,ij->i", normalized, centroids[labels])))


def kmeans(rep: Representation, config: KmeansConfig) -> Clustering:
    """Spherical K-Means: normalize, k-means++ init, iterate assignment and
    normalized-mean centroid updates until the objective's relative
    improvement falls below rel_tol.

    Always ends on an assignment step, so no point is left with a stale
    cluster against the final centroids.
    """
    normalized = _normalize_rows(rep.matrix)
    n = normalized.shape[0]
    distinct = distinct_row_count(rep.matrix)
    if config.k > distinct:
        raise ValueError(f"k={config.k} exceeds the {distinct} distinct rows")

    rng = np.random.default_rng(config.seed)
    centroids = _kmeanspp_init(normalized, config.k, rng)
    labels = _assign(normalized, centroids)
    _repair_empty(normalized, labels, centroids)
    obj = _objective(normalized, labels, centroids)
    history = [obj]

    converged = False
    for _ in range(config.max_iter):
        # update step: normalized member mean; degenerate mean keeps the old centroid
        for c in range(config.k):
            members = normalized[labels == c]
            mean = members.mean(axis=0)
            norm = np.linalg.norm(mean)
            if norm >= 1e-12:
                centroids[c] = mean / norm
        labels = _assign(normalized, centroids)
        repaired = _repair_empty(normalized, labels, centroids)
        new_obj = _objective(normalized, labels, centroids)
        history.append(new_obj)
        prev, obj = obj, new_obj
        if repaired:
            # surgery moved a centroid; points may be stale, keep iterating
            continue
        if prev - new_obj <= config.rel_tol * prev:
            converged = True
            break

    assignment = {lbl: int(c) for lbl, c in zip(rep.row_labels, labels)}
    return Clustering(labels=tuple(rep.row_labels), assignment=assignment,
                      n_clusters=config.k, algorithm="kmeans",
                      centroids=centroids, objective=obj,
                      objective_history=tuple(history), converged=converged)


def _ap_messages(s: np.ndarray, damping: float, max_iter: int,
                 window: int) -> tuple[np.ndarray, np.ndarray, bool]:
    n = s.shape[0]
    r = np.zeros((n, n))
    a = np.zeros((n, n))
    idx = np.arange(n)
    stable = 0
    prev_exemplars: np.ndarray | None = None
    converged = False
    for _ in range(max_iter):
        # responsibilities
        as_ = a + s
        first = np.argmax(as_, axis=1)
        best = as_[idx, first]
        as_[idx, first] = -np.inf
        second = np.max(as_, axis=1)
        r_new = s - best[:, None]
        r_new[idx, first] = s[idx, first] - second
        r = damping * r + (1.0 - damping) * r_new
        # availabilities
        rp = np.maximum(r, 0.0)
        rp[idx, idx] = r[idx, idx]
        a_new = rp.sum(axis=0)[None, :] - rp
        diag = a_new[idx, idx].copy()
        a_new = np.minimum(a_new, 0.0)
        a_new[idx, idx] = diag
        a = damping * a + (1.0 - damping) * a_new

        exemplars = np.flatnonzero(np.diag(a + r) > 0.0)
        if prev_exemplars is not None and exemplars.size and \
                np.array_equal(exemplars, prev_exemplars):
            stable += 1
            if stable >= window:
                converged = True
                break
        else:
            stable = 0
        prev_exemplars = exemplars
    return r, a, converged


def affinity_propagation(rep: Representation, config: ApConfig = ApConfig()) -> Clustering:
    """Frey-Dueck message passing on s(i,j) = 1 - cosine dissimilarity, with
    the diagonal set to the preference (median off-diagonal similarity by
    default)."""
    normalized = _normalize_rows(rep.matrix)
    n = normalized.shape[0]
    if n == 1:
        # message passing degenerates on one point; it is its own exemplar
        key = rep.row_labels[0]
        pref = 0.0 if config.preference == MEDIAN_PREFERENCE else float(config.preference)
        return Clustering(labels=(key,), assignment={key: 0}, n_clusters=1,
                          algorithm="affinity_propagation", exemplars={0: key},
                          objective=pref, converged=True)
    s_clean = normalized @ normalized.T   # 1 - d equals the cosine itself

    if config.preference == MEDIAN_PREFERENCE:
        off_diag = s_clean[~np.eye(n, dtype=bool)]
        preference = float(np.median(off_diag)) if off_diag.size else 0.0
    else:
        preference = float(config.preference)

    s = s_clean.copy()
    np.fill_diagonal(s, preference)
    # constant-seeded eps-scale jitter: breaks the exact-degeneracy
    # oscillation of duplicate rows without being visible at output scale
    jitter_rng = np.random.default_rng(0)
    s = s + (np.finfo(float).eps * np.abs(s) + np.finfo(float).tiny * 100) \
        * jitter_rng.standard_normal((n, n))

    r, a, converged = _ap_messages(s, config.damping, config.max_iter,
                                   config.convergence_window)
    evidence = np.diag(a + r)
    exemplar_idx = np.flatnonzero(evidence > 0.0)
    if exemplar_idx.size == 0:
        exemplar_idx = np.array([int(np.argmax(evidence))])

    # assignments on the clean similarities; ties go to the exemplar with
    # the lexicographically smallest NP key
    keys = rep.row_labels
    order = sorted(range(exemplar_idx.size), key=lambda t: keys[exemplar_idx[t]])
    ordered_exemplars = exemplar_idx[order]        # cluster id = position
    sims = s_clean[:, ordered_exemplars]
    best = sims.max(axis=1)
    chosen = np.argmax(sims == best[:, None], axis=1)   # first max = smallest key
    for cid, e in enumerate(ordered_exemplars):
        chosen[e] = cid

    n_clusters = ordered_exemplars.size
    assignment = {keys[i]: int(chosen[i]) for i in range(n)}
    exemplars = {cid: keys[e] for cid, e in enumerate(ordered_exemplars)}
    is_exemplar = np.zeros(n, dtype=bool)
    is_exemplar[ordered_exemplars] = True
    net_similarity = float(np.sum(best[~is_exemplar]) + preference * n_clusters)
    return Clustering(labels=tuple(keys), assignment=assignment,
                      n_clusters=n_clusters, algorithm="affinity_propagation",
                      exemplars=exemplars, objective=net_similarity,
                      converged=converged)


# ---------------------------------------------------------------------------
# Serialization: CSV of assignments plus a JSON metadata sidecar.

def _meta_path(path: Path) -> Path:
    return path.with_suffix(path.suffix + ".meta.json")


def save_clustering(clustering: Clustering, path: str | Path,
                    config: dict | None = None) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["np_key", "cluster_id"])
        for lbl in clustering.labels:
            writer.writerow([lbl, clustering.assignment[lbl]])
    meta = {
        "algorithm": clustering.algorithm,
        "config": config,
        "n_clusters": clustering.n_clusters,
        "objective": clustering.objective,
        "exemplars": ({str(c): k for c, k in clustering.exemplars.items()}
                      if clustering.exemplars is not None else None),
        "converged": clustering.converged,
    }
    _meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                encoding="utf-8")


def load_clustering(path: str | Path) -> Clustering:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["np_key", "cluster_id"]:
            raise ValueError(f"{path}: unexpected header {header!r}")
        labels: list[str] = []
        assignment: dict[str, int] = {}
        for key, cid in reader:
            labels.append(key)
            assignment[key] = int(cid)
    meta_file = _meta_path(path)
    meta = json.loads(meta_file.read_text(encoding="utf-8")) if meta_file.exists() else {}
    exemplars = meta.get("exemplars")
    return Clustering(
        labels=tuple(labels), assignment=assignment,
        n_clusters=len(set(assignment.values())),
        algorithm=meta.get("algorithm", "unknown"),
        exemplars=({int(c): k for c, k in exemplars.items()} if exemplars else None),
        objective=meta.get("objective"),
        converged=meta.get("converged", True))
