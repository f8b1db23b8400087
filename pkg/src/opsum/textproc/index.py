"""Exact top-N cosine retrieval over tf-idf vectors.

The index is a speed structure only: every query must return exactly what
a linear scan with :func:`opsum.textproc.tfidf.cosine` would return,
including tie order (score descending, then doc_id ascending). Internally
the documents live in one CSR matrix, so a query is a single sparse
matrix-vector product - an inverted-index formulation of the same scan.
"""

from __future__ import annotations

import io
import json

import numpy as np
from scipy import sparse

from opsum.errors import ConfigError, ValidationError
from opsum.textproc.tfidf import SparseVector, TfIdfModel

SNAPSHOT_MAGIC = b"#opsum-snapshot v1\n"


class NNIndex:
    """Immutable after construction; safe for concurrent reads."""

    def __init__(self, doc_ids, matrix, entity_of):
        self.doc_ids = list(doc_ids)
        self.matrix = matrix
        self.entity_of = dict(entity_of)
        self._doc_id_arr = np.asarray(self.doc_ids, dtype=object)
        self._entity_rows: dict[str, np.ndarray] = {}
        by_entity: dict[str, list[int]] = {}
        for row, doc_id in enumerate(self.doc_ids):
            by_entity.setdefault(self.entity_of[doc_id], []).append(row)
        for entity_id, rows in by_entity.items():
            self._entity_rows[entity_id] = np.asarray(rows, dtype=np.int64)
        self._row_of = {doc_id: row for row, doc_id in enumerate(self.doc_ids)}

    def __len__(self) -> int:
        return len(self.doc_ids)

    def scores_against(self, query: SparseVector) -> np.ndarray:
        """Cosine of the query against every indexed document."""
        dim = self.matrix.shape[1]
        q = np.zeros(dim, dtype=np.float64)
        if query.norm != 0.0:
            keep = query.indices < dim
            q[query.indices[keep]] = query.values[keep]
        return self.matrix.dot(q)

    def rows_for_entity(self, entity_id: str) -> np.ndarray:
        return self._entity_rows.get(entity_id, np.empty(0, dtype=np.int64))

    def entities(self) -> list[str]:
        return list(self._entity_rows)


def build_index(doc_ids, vectors, entity_of) -> NNIndex:
    """Assemble an index from parallel doc_id / vector lists."""
    doc_ids = list(doc_ids)
    vectors = list(vectors)
    if len(doc_ids) != len(vectors):
        raise ValidationError(
            f"doc_ids and vectors length mismatch: {len(doc_ids)} != {len(vectors)}"
        )
    if len(set(doc_ids)) != len(doc_ids):
        raise ValidationError("duplicate doc_id in index input")
    missing = [d for d in doc_ids if d not in entity_of]
    if missing:
        raise ValidationError(f"doc_id without entity mapping: {missing[0]!r}")
    dim = 0
    for vec in vectors:
        if len(vec.indices):
            dim = max(dim, int(vec.indices[-1]) + 1)
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, vec in enumerate(vectors):
        indptr[i + 1] = indptr[i] + len(vec.indices)
    if vectors:
        indices = np.concatenate([v.indices for v in vectors])
        data = np.concatenate([v.values for v in vectors])
    else:
        indices = np.empty(0, dtype=np.int64)
        data = np.empty(0, dtype=np.float64)
    matrix = sparse.csr_matrix(
        (data, indices, indptr), shape=(len(vectors), dim), dtype=np.float64
    )
    relevant = {d: entity_of[d] for d in doc_ids}
    return NNIndex(doc_ids, matrix, relevant)


def query_top_n(
    index: NNIndex,
    query: SparseVector,
    n: int,
    within_entity: str | None = None,
    excluding_entity: str | None = None,
    exclude_ids: set[str] | None = None,
) -> list[tuple[str, float]]:
    """Top-n documents by cosine, score descending then doc_id ascending."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if within_entity is not None and excluding_entity is not None:
        raise ConfigError("within_entity and excluding_entity are mutually exclusive")
    if len(index) == 0:
        return []

    if within_entity is not None:
        candidates = index.rows_for_entity(within_entity)
    elif excluding_entity is not None:
        drop = index.rows_for_entity(excluding_entity)
        mask = np.ones(len(index), dtype=bool)
        mask[drop] = False
        candidates = np.nonzero(mask)[0]
    else:
        candidates = np.arange(len(index), dtype=np.int64)

    if exclude_ids:
        keep = [
            i
            for i, row in enumerate(candidates)
            if index.doc_ids[row] not in exclude_ids
        ]
        candidates = candidates[keep]
    if len(candidates) == 0:
        return []

    scores = index.scores_against(query)[candidates]
    ids = index._doc_id_arr[candidates]
    order = np.lexsort((ids, -scores))[:n]
    return [(str(ids[i]), float(scores[i])) for i in order]


def save_snapshot(path, model: TfIdfModel, index: NNIndex) -> None:
    """Write vectorizer + index to one versioned snapshot file."""
    terms = [""] * len(model.vocabulary)
    for term, col in model.vocabulary.items():
        terms[col] = term
    meta = {
        "doc_count": model.doc_count,
        "n_docs": len(index),
        "dim": index.matrix.shape[1],
    }
    buf = io.BytesIO()
    np.savez(
        buf,
        terms=np.asarray(terms, dtype=np.str_),
        idf=model.idf,
        indptr=index.matrix.indptr,
        indices=index.matrix.indices,
        data=index.matrix.data,
        doc_ids=np.asarray(index.doc_ids, dtype=np.str_),
        entities=np.asarray(
            [index.entity_of[d] for d in index.doc_ids], dtype=np.str_
        ),
    )
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(json.dumps(meta, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(buf.getvalue())


def load_snapshot(path) -> tuple[TfIdfModel, NNIndex]:
    """Inverse of :func:`save_snapshot`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(SNAPSHOT_MAGIC))
        if magic != SNAPSHOT_MAGIC:
            raise ValidationError(f"{path}: not a snapshot file (bad magic header)")
        meta = json.loads(fh.readline().decode("utf-8"))
        payload = np.load(io.BytesIO(fh.read()))
    terms = payload["terms"]
    vocabulary = {str(term): col for col, term in enumerate(terms)}
    model = TfIdfModel(
        vocabulary=vocabulary,
        idf=payload["idf"],
        doc_count=int(meta["doc_count"]),
    )
    matrix = sparse.csr_matrix(
        (payload["data"], payload["indices"], payload["indptr"]),
        shape=(int(meta["n_docs"]), int(meta["dim"])),
        dtype=np.float64,
    )
    doc_ids = [str(d) for d in payload["doc_ids"]]
    entity_of = {d: str(e) for d, e in zip(doc_ids, payload["entities"])}
    return model, NNIndex(doc_ids, matrix, entity_of)
