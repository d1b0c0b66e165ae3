"""Content-based item similarity from episode transcripts.

Pipeline: tokenize and stem transcripts, weight stems per document with
TF-IDF, then compare items either directly (cosine over stem vectors) or in a
latent space obtained by truncated SVD of the stem-document matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .corpus import SimilarityMatrix, TranscriptCorpus, ValidationError
from .stemming import stem

MIN_DOCUMENT_FREQUENCY = 2

_TOKEN_SPLIT = re.compile(r"[^a-z]+")


def load_stopwords(path=None) -> frozenset[str]:
    """The shipped English stop-word list, or one word per line from ``path``."""
    if path is None:
        text = resources.files("themetrek.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.split("\n") if w.strip())


def tokenize(text: str, stopwords: frozenset[str]) -> list[str]:
    """Lowercased alphabetic tokens of length >= 2, stop-words removed, stemmed."""
    tokens = _TOKEN_SPLIT.split(text.lower())
    return [stem(t) for t in tokens if len(t) >= 2 and t not in stopwords]


@dataclass
class ProcessedCorpus:
    """Stemmed bag-of-words per document over a shared min-DF-filtered vocabulary."""

    vocabulary: list[str]
    doc_terms: dict[str, dict[str, int]]
    doc_count: int
    doc_freq: dict[str, int]

    @property
    def item_ids(self) -> list[str]:
        return sorted(self.doc_terms)

    def mean_tokens_per_doc(self) -> float:
        totals = [sum(terms.values()) for terms in self.doc_terms.values()]
        return sum(totals) / len(totals)


def preprocess(corpus: TranscriptCorpus, stopwords: frozenset[str] | None = None) -> ProcessedCorpus:
    """Tokenize, stem, and min-DF-filter a transcript corpus.

    A document with no tokens left after stop-word removal and stemming is an
    error; a document emptied later by the min-DF filter is not.
    """
    if not corpus.per_item:
        raise ValidationError("empty transcript corpus")
    if stopwords is None:
        stopwords = load_stopwords()

    raw_terms: dict[str, dict[str, int]] = {}
    for item, text in corpus.per_item.items():
        counts: dict[str, int] = {}
        for token in tokenize(text, stopwords):
            counts[token] = counts.get(token, 0) + 1
        if not counts:
            raise ValidationError(f"transcript for {item!r} reduced to zero tokens")
        raw_terms[item] = counts

    doc_freq: dict[str, int] = {}
    for counts in raw_terms.values():
        for term in counts:
            doc_freq[term] = doc_freq.get(term, 0) + 1

    kept = {t for t, n in doc_freq.items() if n >= MIN_DOCUMENT_FREQUENCY}
    return ProcessedCorpus(
        vocabulary=sorted(kept),
        doc_terms={
            item: {t: c for t, c in counts.items() if t in kept}
            for item, counts in raw_terms.items()
        },
        doc_count=len(raw_terms),
        doc_freq={t: doc_freq[t] for t in sorted(kept)},
    )


@dataclass
class TfIdfMatrix:
    """Dense stem-by-item weight matrix, rows ordered like ``stems``."""

    stems: list[str]
    item_ids: list[str]
    weights: np.ndarray

    def item_vector(self, item_id: str) -> np.ndarray:
        return self.weights[:, self.item_ids.index(item_id)]


def build_tfidf(pc: ProcessedCorpus) -> TfIdfMatrix:
    """Term frequency scaled by ln(N / n_w) per stem."""
    items = pc.item_ids
    stems = pc.vocabulary
    n = pc.doc_count
    weights = np.zeros((len(stems), len(items)))
    idf = {t: np.log(n / pc.doc_freq[t]) for t in stems}
    stem_row = {t: r for r, t in enumerate(stems)}
    for col, item in enumerate(items):
        for term, count in pc.doc_terms[item].items():
            weights[stem_row[term], col] = count * idf[term]
    return TfIdfMatrix(stems=stems, item_ids=items, weights=weights)


def cosine_items(v_i, v_j) -> float:
    """Cosine of two equal-length vectors, clamped into [0, 1]; zero vectors read 0."""
    a = np.asarray(v_i, dtype=float)
    b = np.asarray(v_j, dtype=float)
    if a.shape != b.shape:
        raise ValidationError(f"vector length mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(min(1.0, max(0.0, float(a @ b) / (na * nb))))


@dataclass
class LatentItemVectors:
    """Per-item latent vectors: columns of the top-p singular-value-scaled Vt."""

    p: int
    item_ids: list[str]
    vectors: np.ndarray
    singular_values: np.ndarray

    def item_vector(self, item_id: str) -> np.ndarray:
        return self.vectors[self.item_ids.index(item_id)]

    def export_tsv(self, path) -> None:
        lines = []
        for row, item in enumerate(self.item_ids):
            reals = "\t".join(repr(float(x)) for x in self.vectors[row])
            lines.append(f"{item}\t{reals}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def truncated_svd(m: TfIdfMatrix, p: int) -> LatentItemVectors:
    """Top-p latent item vectors from the stem-document matrix."""
    limit = min(len(m.stems), len(m.item_ids))
    if not 1 <= p <= limit:
        raise ValidationError(f"factor count {p} outside [1, {limit}]")
    _, s, vt = np.linalg.svd(m.weights, full_matrices=False)
    vectors = (s[:p, None] * vt[:p, :]).T
    return LatentItemVectors(
        p=p, item_ids=list(m.item_ids), vectors=vectors, singular_values=s
    )


def _pairwise_cosine(columns: np.ndarray) -> np.ndarray:
    """All-pairs clamped cosine over matrix columns; zero columns score 0."""
    norms = np.linalg.norm(columns, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    unit = columns / safe
    grid = unit.T @ unit
    grid[norms == 0, :] = 0.0
    grid[:, norms == 0] = 0.0
    return np.clip(grid, 0.0, 1.0)


def build_text_similarity(
    corpus: TranscriptCorpus,
    backend: str = "tfidf",
    p: int | None = None,
    stopwords: frozenset[str] | None = None,
) -> SimilarityMatrix:
    """All-pairs item similarity over transcripts, TF-IDF or LSI backend."""
    pc = preprocess(corpus, stopwords)
    tfidf = build_tfidf(pc)
    backend = backend.lower()
    if backend == "tfidf":
        columns = tfidf.weights
    elif backend == "lsi":
        if p is None:
            raise ValidationError("LSI backend needs a factor count p")
        columns = truncated_svd(tfidf, p).vectors.T
    else:
        raise ValidationError(f"unknown text backend {backend!r}")

    grid = _pairwise_cosine(columns)
    items = tfidf.item_ids
    matrix = SimilarityMatrix(items)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            s = float(grid[i, j])
            if s > 0.0:
                matrix.set(items[i], items[j], s)
    return matrix
