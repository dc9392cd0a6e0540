"""Shared helpers for the test suite: tiny CoNLL-U builders, partition
enumeration, and hand-rolled oracle implementations that deliberately do NOT
reuse library code paths."""
from __future__ import annotations

import itertools
import math

import numpy as np

from termforge.clustering import Clustering
from termforge.matrices import NP_VPC, Representation


# ---------------------------------------------------------------- CoNLL-U

def conllu_token(index, form, lemma, upos, head, deprel):
    # 10 columns; the ones the parser ignores stay "_"
    return "\t".join([str(index), form, lemma, upos, "_", "_",
                      str(head), deprel, "_", "_"])


def conllu_sentence(rows, sent_id=None):
    lines = []
    if sent_id is not None:
        lines.append(f"# sent_id = {sent_id}")
    lines.extend(conllu_token(*r) for r in rows)
    return "\n".join(lines)


def conllu_doc(sentences, doc_id=None):
    head = [f"# newdoc id = {doc_id}"] if doc_id is not None else ["# newdoc"]
    return "\n\n".join(["\n".join(head + [sentences[0]])] + list(sentences[1:])) + "\n"


def join_sentences(sentences):
    return "\n\n".join(sentences) + "\n"


# ------------------------------------------------------------- partitions

def restricted_growth_strings(n):
    """All set partitions of range(n) as canonical label sequences where
    label[i] <= max(label[:i]) + 1.  Bell(n) sequences."""
    def rec(prefix, used):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for lab in range(used + 1):
            yield from rec(prefix + [lab], max(used, lab + 1))
    yield from rec([], 0)


def partitions_into(n, k):
    """Set partitions of range(n) into exactly k non-empty blocks,
    as label sequences."""
    for labels in restricted_growth_strings(n):
        if max(labels) + 1 == k:
            yield labels


def make_clustering(labels_by_point, keys=None, algorithm="test"):
    """Clustering from a label sequence; point i gets key keys[i] or 'p<i>'."""
    if keys is None:
        keys = tuple(f"p{i}" for i in range(len(labels_by_point)))
    assignment = {k: int(c) for k, c in zip(keys, labels_by_point)}
    return Clustering(labels=tuple(keys), assignment=assignment,
                      n_clusters=max(labels_by_point) + 1, algorithm=algorithm)


def make_rep(matrix, keys=None, provenance=NP_VPC):
    matrix = np.asarray(matrix, dtype=float)
    if keys is None:
        keys = tuple(f"p{i}" for i in range(matrix.shape[0]))
    return Representation(row_labels=tuple(keys), matrix=matrix,
                          provenance=provenance)


# ---------------------------------------------------------------- oracles

def oracle_silhouette(d, labels):
    """Naive per-point silhouette, straight from the definition."""
    n = len(labels)
    values = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            values.append(0.0)
            continue
        a = sum(d[i][j] for j in own) / len(own)
        b = math.inf
        for other in set(labels) - {labels[i]}:
            members = [j for j in range(n) if labels[j] == other]
            b = min(b, sum(d[i][j] for j in members) / len(members))
        if a == 0.0 and b == 0.0:
            values.append(0.0)
        else:
            values.append((b - a) / max(a, b))
    return sum(values) / n


def oracle_dunn2(d, labels):
    """min over cluster pairs of mean between-distance, divided by max over
    clusters of mean within-distance (pairs i != j)."""
    clusters = sorted(set(labels))
    members = {c: [i for i, l in enumerate(labels) if l == c] for c in clusters}
    between = math.inf
    for a, b in itertools.combinations(clusters, 2):
        total = sum(d[i][j] for i in members[a] for j in members[b])
        between = min(between, total / (len(members[a]) * len(members[b])))
    within = 0.0
    seen_pair = False
    for c in clusters:
        pts = members[c]
        if len(pts) < 2:
            continue
        seen_pair = True
        total = sum(d[i][j] for i in pts for j in pts if i != j)
        within = max(within, total / (len(pts) * (len(pts) - 1)))
    if not seen_pair or within == 0.0:
        return math.inf
    return between / within


def oracle_ari(xs, ys):
    """Adjusted Rand from explicit pair counting: walk every unordered pair
    once and classify it into the four agreement cells."""
    n = len(xs)
    a = b = c = d = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_x = xs[i] == xs[j]
            same_y = ys[i] == ys[j]
            if same_x and same_y:
                a += 1
            elif same_x:
                b += 1
            elif same_y:
                c += 1
            else:
                d += 1
    denom = (a + b) * (b + d) + (a + c) * (c + d)
    if denom == 0:
        return 1.0 if b == 0 and c == 0 else 0.0
    return 2.0 * (a * d - b * c) / denom


def oracle_purity(assignment, gold):
    """Purity over the gold intersection, straight from the definition."""
    keys = [k for k in assignment if k in gold]
    clusters = {}
    for k in keys:
        clusters.setdefault(assignment[k], []).append(gold[k])
    hits = sum(max(labels.count(l) for l in set(labels))
               for labels in clusters.values())
    return hits / len(keys)


def spherical_objective(points, labels, k):
    """K-Means objective for a fixed assignment: cosine dissimilarity of each
    L2-normalized point to its cluster's normalized mean direction."""
    pts = np.asarray(points, dtype=float)
    norm = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    total = 0.0
    for c in range(k):
        block = norm[[i for i, l in enumerate(labels) if l == c]]
        mean = block.mean(axis=0)
        length = np.linalg.norm(mean)
        if length < 1e-12:
            total += float(block.shape[0])  # all dissimilarity 1 to a null direction
            continue
        centroid = mean / length
        total += float(np.sum(1.0 - block @ centroid))
    return total


def brute_force_kmeans(points, k):
    """Global optimum of the spherical K-Means objective by enumerating every
    partition into exactly k non-empty clusters."""
    n = len(points)
    best = math.inf
    best_labels = None
    for labels in partitions_into(n, k):
        obj = spherical_objective(points, labels, k)
        if obj < best:
            best = obj
            best_labels = labels
    return best, best_labels


def brute_force_exemplars(similarity, preference):
    """Best exemplar subset for the affinity-propagation net-similarity
    objective, by enumerating all non-empty subsets."""
    n = similarity.shape[0]
    best = -math.inf
    best_set = None
    for r in range(1, n + 1):
        for subset in itertools.combinations(range(n), r):
            score = preference * r
            ok = True
            for i in range(n):
                if i in subset:
                    continue
                score += max(similarity[i, e] for e in subset)
            if ok and score > best:
                best = score
                best_set = subset
    return best, best_set
