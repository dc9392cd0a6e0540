"""Cluster validity indices: silhouette width, Dunn2, purity, adjusted Rand.

Internal indices read a pairwise dissimilarity matrix aligned with the
clustering's label order.  External indices compare against a gold standard
and are computed on the intersection of clustered and gold terms only, with
the coverage fraction reported alongside rather than silently folded in.

Undefined values stay undefined: silhouette/Dunn2 need at least two
clusters, Dunn2 with only singleton (or zero-spread) clusters is +inf, and
a missing gold standard leaves the external columns as None.  Serialization
maps None to "NA" and infinity to "inf".
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import Clustering


@dataclass(frozen=True)
class GoldStandard:
    mapping: dict[str, str]       # term key -> core-concept label
    labels: frozenset[str]

    @property
    def n_labels(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class IndexReport:
    n_clusters: int
    purity: float | None          # None without a gold standard
    adjusted_rand: float | None
    dunn2: float | None           # may be +inf; None when n_clusters < 2
    silhouette: float | None      # None when n_clusters < 2
    coverage: float | None        # clustered terms found in gold / all clustered


def normalize_term_key(term: str) -> str:
    """Lowercase, single internal spaces; matches NP key construction."""
    return " ".join(term.lower().split())


def load_gold_standard(path: str | Path) -> GoldStandard:
    path = Path(path)
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected term<TAB>label, got {line!r}")
            term = normalize_term_key(parts[0])
            label = parts[1].strip()
            if not term or not label:
                raise ValueError(f"{path}:{lineno}: empty term or label")
            if term in mapping and mapping[term] != label:
                raise ValueError(
                    f"{path}:{lineno}: term {term!r} assigned conflicting labels "
                    f"{mapping[term]!r} and {label!r}")
            mapping[term] = label
    if not mapping:
        raise ValueError(f"{path}: gold standard is empty")
    return GoldStandard(mapping=mapping, labels=frozenset(mapping.values()))


def _check_dissimilarity(d: np.ndarray, n: int) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.shape != (n, n):
        raise ValueError(f"dissimilarity shape {d.shape} does not match {n} labels")
    if not np.allclose(np.diag(d), 0.0, atol=1e-12):
        raise ValueError("dissimilarity diagonal must be zero")
    if not np.allclose(d, d.T, atol=1e-12):
        raise ValueError("dissimilarity matrix must be symmetric")
    return d


def silhouette_width(dissimilarity: np.ndarray, clustering: Clustering) -> float:
    """Mean of s(i) = (b(i) - a(i)) / max(a(i), b(i)); singleton points
    contribute 0, as do points with a(i) = b(i) = 0."""
    if clustering.n_clusters < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    ids = clustering.cluster_ids()
    d = _check_dissimilarity(dissimilarity, ids.size)
    scores = np.zeros(ids.size)
    for i in range(ids.size):
        own = ids == ids[i]
        if own.sum() == 1:
            continue                      # singleton convention: s = 0
        own[i] = False
        a = d[i, own].mean()
        b = min(d[i, ids == c].mean() for c in range(clustering.n_clusters) if c != ids[i])
        denom = max(a, b)
        scores[i] = (b - a) / denom if denom > 0.0 else 0.0
    return float(scores.mean())


def dunn2(dissimilarity: np.ndarray, clustering: Clustering) -> float:
    """Minimum average between-cluster dissimilarity over maximum average
    within-cluster dissimilarity (non-singleton clusters only).  A zero or
    absent denominator yields +inf."""
    if clustering.n_clusters < 2:
        raise ValueError("dunn2 needs at least 2 clusters")
    ids = clustering.cluster_ids()
    d = _check_dissimilarity(dissimilarity, ids.size)
    member_idx = [np.flatnonzero(ids == c) for c in range(clustering.n_clusters)]

    between = min(
        float(d[np.ix_(member_idx[c1], member_idx[c2])].mean())
        for c1 in range(clustering.n_clusters)
        for c2 in range(c1 + 1, clustering.n_clusters))

    within = 0.0
    for idx in member_idx:
        if idx.size < 2:
            continue
        block = d[np.ix_(idx, idx)]
        # average over distinct unordered pairs
        within = max(within, float(block.sum() / (idx.size * (idx.size - 1))))
    if within == 0.0:
        return math.inf
    return between / within


def _intersection(clustering: Clustering, gold: GoldStandard) -> list[str]:
    keys = [lbl for lbl in clustering.labels if lbl in gold.mapping]
    if not keys:
        missing = [lbl for lbl in clustering.labels[:5]]
        raise ValueError(
            "no clustered term appears in the gold standard; "
            f"sample clustered keys: {', '.join(missing)}")
    return keys


def coverage(clustering: Clustering, gold: GoldStandard) -> float:
    found = sum(1 for lbl in clustering.labels if lbl in gold.mapping)
    return found / len(clustering.labels)


def purity(clustering: Clustering, gold: GoldStandard) -> float:
    """Majority-label fraction over the clustered-and-gold intersection."""
    keys = _intersection(clustering, gold)
    per_cluster: dict[int, Counter] = {}
    for key in keys:
        per_cluster.setdefault(clustering.assignment[key], Counter())[gold.mapping[key]] += 1
    correct = sum(max(counts.values()) for counts in per_cluster.values())
    return correct / len(keys)


def ari_from_assignments(xs, ys) -> float:
    """Hubert-Arabie adjusted Rand from two equal-length assignment
    sequences, via exact integer pair counts.

    Degenerate denominator (both partitions all-singletons or both
    one-cluster): 1.0 when the partitions are identical, else 0.0.
    """
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys):
        raise ValueError(f"assignment lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    contingency = Counter(zip(xs, ys))
    a = sum(math.comb(v, 2) for v in contingency.values())
    same_x = sum(math.comb(v, 2) for v in Counter(xs).values())
    same_y = sum(math.comb(v, 2) for v in Counter(ys).values())
    total = math.comb(n, 2)
    b = same_x - a            # together in xs, apart in ys
    c = same_y - a            # apart in xs, together in ys
    d = total - same_x - same_y + a
    denom = (a + b) * (b + d) + (a + c) * (c + d)
    if denom == 0:
        return 1.0 if b == 0 and c == 0 else 0.0
    return 2.0 * (a * d - b * c) / denom


def adjusted_rand(clustering: Clustering, gold: GoldStandard) -> float:
    keys = _intersection(clustering, gold)
    xs = [clustering.assignment[k] for k in keys]
    ys = [gold.mapping[k] for k in keys]
    return ari_from_assignments(xs, ys)


def evaluate_clustering(dissimilarity: np.ndarray, clustering: Clustering,
                        gold: GoldStandard | None) -> IndexReport:
    """All four indices for one clustering; external columns stay None
    without a gold standard, internal columns stay None below 2 clusters."""
    if clustering.n_clusters >= 2:
        sil = silhouette_width(dissimilarity, clustering)
        dn2 = dunn2(dissimilarity, clustering)
    else:
        sil = None
        dn2 = None
    if gold is not None:
        pur = purity(clustering, gold)
        ari = adjusted_rand(clustering, gold)
        cov = coverage(clustering, gold)
    else:
        pur = ari = cov = None
    return IndexReport(n_clusters=clustering.n_clusters, purity=pur,
                       adjusted_rand=ari, dunn2=dn2, silhouette=sil,
                       coverage=cov)


def format_value(x) -> str:
    """Serialization convention shared by every CSV writer: None is NA,
    infinities spell inf, floats round-trip exactly via repr."""
    if x is None:
        return "NA"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)
