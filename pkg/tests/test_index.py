import random

import pytest

from opsum.errors import ConfigError, ValidationError
from opsum.textproc import (
    build_index,
    cosine,
    fit_tfidf,
    query_top_n,
    tokenize,
    vectorize,
)
from opsum.textproc.index import load_snapshot, save_snapshot

from helpers import word_vocab


def build_random_corpus(rng, n_docs, n_entities, vocab):
    ids, docs, entity_of = [], [], {}
    for i in range(n_docs):
        doc_id = f"d{i:04d}"
        ids.append(doc_id)
        docs.append(tokenize(" ".join(rng.choices(vocab, k=rng.randint(1, 12)))))
        entity_of[doc_id] = f"e{rng.randrange(n_entities)}"
    model = fit_tfidf(docs)
    vectors = [vectorize(model, d) for d in docs]
    return model, ids, vectors, entity_of


def linear_scan(ids, vectors, entity_of, query, n, within=None, excluding=None,
                exclude_ids=frozenset()):
    rows = []
    for doc_id, vec in zip(ids, vectors):
        if within is not None and entity_of[doc_id] != within:
            continue
        if excluding is not None and entity_of[doc_id] == excluding:
            continue
        if doc_id in exclude_ids:
            continue
        rows.append((doc_id, cosine(query, vec)))
    rows.sort(key=lambda t: (-t[1], t[0]))
    return rows[:n]


def test_index_size():
    rng = random.Random(0)
    model, ids, vectors, entity_of = build_random_corpus(rng, 3, 2, word_vocab(10))
    index = build_index(ids, vectors, entity_of)
    assert len(index) == 3


def test_empty_index_returns_nothing():
    index = build_index([], [], {})
    model, ids, vectors, _ = build_random_corpus(random.Random(1), 2, 1, word_vocab(5))
    assert query_top_n(index, vectors[0], 5) == []


def test_length_mismatch_rejected():
    rng = random.Random(2)
    model, ids, vectors, entity_of = build_random_corpus(rng, 3, 2, word_vocab(10))
    with pytest.raises(ValidationError):
        build_index(ids[:2], vectors, entity_of)


def test_duplicate_doc_id_rejected():
    rng = random.Random(2)
    model, ids, vectors, entity_of = build_random_corpus(rng, 3, 2, word_vocab(10))
    ids[1] = ids[0]
    entity_of[ids[0]] = "e0"
    with pytest.raises(ValidationError):
        build_index(ids, vectors, entity_of)


def test_conflicting_filters_rejected():
    rng = random.Random(2)
    model, ids, vectors, entity_of = build_random_corpus(rng, 3, 2, word_vocab(10))
    index = build_index(ids, vectors, entity_of)
    with pytest.raises(ConfigError):
        query_top_n(index, vectors[0], 1, within_entity="e0", excluding_entity="e1")


def test_n_below_one_rejected():
    rng = random.Random(2)
    model, ids, vectors, entity_of = build_random_corpus(rng, 3, 2, word_vocab(10))
    index = build_index(ids, vectors, entity_of)
    with pytest.raises(ValidationError):
        query_top_n(index, vectors[0], 0)


def test_within_filter_on_absent_entity():
    rng = random.Random(3)
    model, ids, vectors, entity_of = build_random_corpus(rng, 5, 2, word_vocab(10))
    index = build_index(ids, vectors, entity_of)
    assert query_top_n(index, vectors[0], 3, within_entity="nope") == []


def test_queries_match_linear_scan_exactly():
    rng = random.Random(42)
    vocab = word_vocab(30)
    model, ids, vectors, entity_of = build_random_corpus(rng, 200, 7, vocab)
    index = build_index(ids, vectors, entity_of)
    for _ in range(60):
        query = vectorize(model, tokenize(" ".join(rng.choices(vocab, k=rng.randint(1, 8)))))
        n = rng.randint(1, 12)
        cases = [
            {},
            {"within_entity": f"e{rng.randrange(7)}"},
            {"excluding_entity": f"e{rng.randrange(7)}"},
            {"exclude_ids": set(rng.sample(ids, k=5))},
        ]
        for kw in cases:
            got = query_top_n(index, query, n, **kw)
            want = linear_scan(
                ids, vectors, entity_of, query, n,
                within=kw.get("within_entity"),
                excluding=kw.get("excluding_entity"),
                exclude_ids=kw.get("exclude_ids", frozenset()),
            )
            assert got == want


def test_snapshot_roundtrip_is_query_identical(tmp_path):
    rng = random.Random(7)
    vocab = word_vocab(25)
    model, ids, vectors, entity_of = build_random_corpus(rng, 80, 5, vocab)
    index = build_index(ids, vectors, entity_of)
    path = tmp_path / "corpus.snap"
    save_snapshot(path, model, index)
    model2, index2 = load_snapshot(path)
    assert model2.vocabulary == model.vocabulary
    assert model2.idf.tolist() == model.idf.tolist()
    for _ in range(25):
        text = " ".join(rng.choices(vocab, k=rng.randint(1, 9)))
        q1 = vectorize(model, tokenize(text))
        q2 = vectorize(model2, tokenize(text))
        assert query_top_n(index, q1, 7) == query_top_n(index2, q2, 7)


def test_snapshot_bad_magic_rejected(tmp_path):
    path = tmp_path / "corrupt.snap"
    path.write_bytes(b"not a snapshot")
    with pytest.raises(ValidationError):
        load_snapshot(path)
