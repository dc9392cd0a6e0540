"""Skip-gram word embeddings with negative sampling, trained on lemmas.

Plain numpy implementation so the training loop stays inspectable and
bitwise-deterministic for a given seed (single-threaded).  The loss and its
gradients live in a pure function, ``sgns_loss_and_grads``, which the tests
probe with central finite differences.

Sampling discipline, fixed so reruns reproduce exactly:
  * one ``default_rng(seed)`` drives everything, in this order: input matrix
    init, then negative draws in corpus order;
  * the context window is fixed width (no random shrinking);
  * negatives equal to the positive context are redrawn.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from .corpus import Corpus
from .matrices import NP_W2V, Representation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SkipgramConfig:
    dim: int = 100
    window: int = 5           # tokens each side of the center
    negatives: int = 5        # noise samples per positive pair
    epochs: int = 5
    min_count: int = 2
    learning_rate: float = 0.025
    min_learning_rate: float = 1e-4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("dim, window, negatives and epochs must all be >= 1")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if not 0 < self.learning_rate:
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class EmbeddingTable:
    vocab: dict[str, int]     # word -> row index into vectors
    vectors: np.ndarray       # |vocab| x dim

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, word: str) -> bool:
        return word in self.vocab

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.vocab[word]]

    def words(self) -> tuple[str, ...]:
        ordered = sorted(self.vocab, key=self.vocab.get)
        return tuple(ordered)


def sgns_loss_and_grads(center_vec: np.ndarray, out_rows: np.ndarray,
                        labels: np.ndarray):
    """Negative-sampling loss for one center vector against a stack of
    output rows (the true context first, noise words after).

    labels: 1.0 for the positive row, 0.0 for noise rows.
    Returns (loss, grad wrt center_vec, grad wrt out_rows).
    """
    scores = out_rows @ center_vec
    # -log sigma(s) for label 1, -log sigma(-s) for label 0, stably
    loss = float(np.sum(np.logaddexp(0.0, np.where(labels > 0.5, -scores, scores))))
    residual = expit(scores) - labels
    grad_center = out_rows.T @ residual
    grad_out = np.outer(residual, center_vec)
    return loss, grad_center, grad_out


def _vocab_from_counts(counts: Counter, min_count: int) -> list[str]:
    kept = [w for w, c in counts.items() if c >= min_count]
    kept.sort(key=lambda w: (-counts[w], w))
    return kept


def iter_window_pairs(sentence_length: int, window: int):
    """(center, context) position pairs for a fixed-width window, in the
    order the trainer consumes them."""
    for i in range(sentence_length):
        lo = max(0, i - window)
        hi = min(sentence_length, i + window + 1)
        for j in range(lo, hi):
            if j != i:
                yield i, j


def train_skipgram(corpus: Corpus, config: SkipgramConfig = SkipgramConfig()) -> EmbeddingTable:
    """Train skip-gram vectors over the corpus's lemma sequences.

    Vocabulary keeps lemmas with frequency >= min_count, ordered by
    descending frequency (ties alphabetical).  The learning rate decays
    linearly per training pair down to ``min_learning_rate``.
    """
    counts: Counter = Counter()
    raw_sentences: list[list[str]] = []
    for sentence in corpus.sentences():
        lemmas = [t.lemma for t in sentence.tokens]
        raw_sentences.append(lemmas)
        counts.update(lemmas)

    words = _vocab_from_counts(counts, config.min_count)
    if not words:
        raise ValueError(
            f"no lemma reaches min_count={config.min_count}; "
            "lower the threshold or supply more text")
    vocab = {w: i for i, w in enumerate(words)}

    # unigram^0.75 noise distribution over the kept vocabulary
    noise = np.array([counts[w] for w in words], dtype=float) ** 0.75
    noise /= noise.sum()

    # out-of-vocab tokens vanish before windowing, as in word2vec
    sentences = [[vocab[w] for w in lemmas if w in vocab] for lemmas in raw_sentences]
    sentences = [s for s in sentences if len(s) >= 2]

    window = config.window
    pairs_per_pass = sum(
        sum(1 for _ in iter_window_pairs(len(s), window)) for s in sentences)
    total_pairs = pairs_per_pass * config.epochs
    if total_pairs == 0:
        raise ValueError("corpus has no sentence with two in-vocab tokens")

    rng = np.random.default_rng(config.seed)
    w_in = (rng.random((len(words), config.dim)) - 0.5) / config.dim
    w_out = np.zeros((len(words), config.dim))

    lr0, lr_floor = config.learning_rate, config.min_learning_rate
    pairs_done = 0
    for _ in range(config.epochs):
        for sent in sentences:
            for i, j in iter_window_pairs(len(sent), window):
                center, context = sent[i], sent[j]
                lr = max(lr_floor, lr0 * (1.0 - pairs_done / total_pairs))
                pairs_done += 1

                negs = rng.choice(len(words), size=config.negatives, p=noise)
                while True:
                    clash = negs == context
                    if not clash.any():
                        break
                    negs[clash] = rng.choice(len(words), size=int(clash.sum()), p=noise)

                rows = np.concatenate(([context], negs))
                labels = np.zeros(len(rows))
                labels[0] = 1.0
                _, grad_center, grad_out = sgns_loss_and_grads(
                    w_in[center], w_out[rows], labels)
                w_in[center] -= lr * grad_center
                # np.add.at accumulates when a noise word repeats
                np.add.at(w_out, rows, -lr * grad_out)

    return EmbeddingTable(vocab=vocab, vectors=w_in)


def np_vectors(table: EmbeddingTable, nps: list[str]) -> Representation:
    """Compose one vector per NP key: single in-vocab word keeps its row,
    multiword keys take the mean over in-vocab components.  Keys with no
    in-vocab component are dropped (reported via the warning log and the
    Representation's dropped_labels)."""
    kept: list[str] = []
    rows: list[np.ndarray] = []
    dropped: list[str] = []
    for key in nps:
        component_rows = [table.vector(w) for w in key.split() if w in table.vocab]
        if not component_rows:
            dropped.append(key)
            continue
        kept.append(key)
        rows.append(np.mean(component_rows, axis=0))
    if dropped:
        log.warning("np_vectors: %d NP(s) have no in-vocab component: %s%s",
                    len(dropped), ", ".join(dropped[:5]),
                    ", ..." if len(dropped) > 5 else "")
    matrix = np.vstack(rows) if rows else np.zeros((0, table.dim))
    return Representation(tuple(kept), matrix, NP_W2V, tuple(dropped))


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    """Header ``rows cols``, then one line per word: key then its reals,
    all space-separated."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.vocab)} {table.dim}\n")
        for word in table.words():
            row = table.vectors[table.vocab[word]]
            fh.write(word + " " + " ".join(repr(float(v)) for v in row) + "\n")


def load_embeddings(path: str | Path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: bad embedding header {header!r}")
        n_rows, n_cols = int(header[0]), int(header[1])
        vocab: dict[str, int] = {}
        vectors = np.zeros((n_rows, n_cols))
        for i in range(n_rows):
            parts = fh.readline().rstrip("\n").split(" ")
            if len(parts) != n_cols + 1:
                raise ValueError(f"{path}: row {i} has {len(parts) - 1} values, expected {n_cols}")
            vocab[parts[0]] = i
            vectors[i] = [float(v) for v in parts[1:]]
    return EmbeddingTable(vocab=vocab, vectors=vectors)
