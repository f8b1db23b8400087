"""tf-idf vectorization and cosine similarity over sparse vectors.

Weighting contract: tf is the raw in-document count, idf(term) is
``ln((1 + n_docs) / (1 + df(term))) + 1``, vectors are L2-normalized.
No stopword removal, no sublinear tf. Out-of-vocabulary terms are
dropped at vectorization time; a document with no in-vocabulary terms
becomes the zero vector (norm 0.0).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from opsum.errors import ValidationError
from opsum.textproc.tokenizer import TokenSeq


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    doc_count: int


@dataclass(frozen=True)
class SparseVector:
    indices: np.ndarray
    values: np.ndarray
    norm: float

    def __post_init__(self):
        assert len(self.indices) == len(self.values)


def fit_tfidf(docs: list[TokenSeq]) -> TfIdfModel:
    """Fit vocabulary and idf weights on a corpus of token sequences."""
    if not docs:
        raise ValidationError("cannot fit tf-idf on an empty corpus")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    n = len(docs)
    idf = np.empty(len(vocabulary), dtype=np.float64)
    for term, col in vocabulary.items():
        idf[col] = math.log((1 + n) / (1 + df[term])) + 1.0
    return TfIdfModel(vocabulary=vocabulary, idf=idf, doc_count=n)


def vectorize(model: TfIdfModel, doc: TokenSeq) -> SparseVector:
    """Map a token sequence to an L2-normalized tf-idf vector."""
    counts = Counter(doc.tokens)
    cols = []
    weights = []
    for term, count in counts.items():
        col = model.vocabulary.get(term)
        if col is not None:
            cols.append(col)
            weights.append(count * model.idf[col])
    if not cols:
        return SparseVector(
            indices=np.empty(0, dtype=np.int64),
            values=np.empty(0, dtype=np.float64),
            norm=0.0,
        )
    order = np.argsort(cols)
    indices = np.asarray(cols, dtype=np.int64)[order]
    values = np.asarray(weights, dtype=np.float64)[order]
    length = math.sqrt(float(values @ values))
    return SparseVector(indices=indices, values=values / length, norm=1.0)


def cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine similarity of two already-normalized sparse vectors."""
    if u.norm == 0.0 or v.norm == 0.0:
        return 0.0
    i = j = 0
    total = 0.0
    ui, vi = u.indices, v.indices
    while i < len(ui) and j < len(vi):
        a, b = ui[i], vi[j]
        if a == b:
            total += u.values[i] * v.values[j]
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return float(total)
