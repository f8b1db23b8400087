"""Training-pair construction.

Pseudo pairs treat each review as a summary and retrieve the most
similar reviews of the same entity as sources. Noisy pairs match a real
summary against entities other than its own: every candidate entity
contributes its best size-N source set, entities are ranked by that
score, and the top few become pairs. Because the objective is a sum of
per-document similarities, picking the N individually most similar
documents is the exact maximizer over all size-N subsets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from opsum.artifacts import iter_jsonl, write_jsonl_header
from opsum.corpus import EntityGroup, Summary
from opsum.errors import ValidationError
from opsum.supervision import SupervisionMask, AlignmentMode
from opsum.textproc.index import NNIndex, build_index, query_top_n
from opsum.textproc.tfidf import TfIdfModel, vectorize
from opsum.textproc.tokenizer import TokenSeq, tokenize
from opsum.util import parallel_map


@dataclass
class PairingConfig:
    n_sources: int = 8
    top_k: int = 100_000
    noisy_pairs_per_summary: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.n_sources < 1:
            raise ValidationError("n_sources must be >= 1")
        if self.top_k < 1:
            raise ValidationError("top_k must be >= 1")
        if self.noisy_pairs_per_summary < 1:
            raise ValidationError("noisy_pairs_per_summary must be >= 1")


@dataclass
class TrainingPair:
    pair_id: str
    summary_id: str
    summary_text: str
    summary_tokens: TokenSeq
    source_review_ids: list[str]
    source_texts: list[str]
    score: float
    kind: str
    mask: SupervisionMask | None = None
    mask_mode: str | None = None


def _group_pseudo_pairs(group: EntityGroup, model: TfIdfModel, cfg: PairingConfig):
    tokens = [tokenize(r.text) for r in group.reviews]
    vectors = [vectorize(model, t) for t in tokens]
    text_of = {r.review_id: r.text for r in group.reviews}
    group_index = build_index(
        [r.review_id for r in group.reviews],
        vectors,
        {r.review_id: group.entity_id for r in group.reviews},
    )
    pairs = []
    for i, review in enumerate(group.reviews):
        hits = query_top_n(
            group_index,
            vectors[i],
            cfg.n_sources,
            exclude_ids={review.review_id},
        )
        pairs.append(
            TrainingPair(
                pair_id=f"pseudo-{review.review_id}",
                summary_id=review.review_id,
                summary_text=review.text,
                summary_tokens=tokens[i],
                source_review_ids=[doc_id for doc_id, _ in hits],
                source_texts=[text_of[doc_id] for doc_id, _ in hits],
                score=float(sum(score for _, score in hits)),
                kind="pseudo",
            )
        )
    return pairs


def build_pseudo_pairs(
    groups: list[EntityGroup],
    model: TfIdfModel,
    cfg: PairingConfig,
    workers: int = 1,
) -> tuple[list[TrainingPair], int]:
    """Within-entity pseudo pairs, globally ranked and cut to top_k.

    Groups are independent, so they may be fanned out over ``workers``
    threads; results merge in group order, keeping output deterministic.
    Returns (pairs, skipped_singleton_groups).
    """
    if model.doc_count < 1:
        raise ValidationError("tf-idf model is not fitted")
    eligible = [g for g in groups if len(g.reviews) >= 2]
    skipped = len(groups) - len(eligible)
    per_group = parallel_map(
        lambda g: _group_pseudo_pairs(g, model, cfg), eligible, workers
    )
    candidates = [pair for pairs in per_group for pair in pairs]
    candidates.sort(key=lambda p: (-p.score, p.pair_id))
    return candidates[: cfg.top_k], skipped


def build_noisy_pairs(
    summaries: list[Summary],
    groups: list[EntityGroup],
    model: TfIdfModel,
    index: NNIndex,
    cfg: PairingConfig,
) -> tuple[list[TrainingPair], int]:
    """Cross-entity noisy pairs; reviews of the summary's own entity are
    never eligible as sources.

    Returns (pairs, skipped_zero_vector_summaries).
    """
    text_of = {r.review_id: r.text for g in groups for r in g.reviews}
    entity_ids = sorted(index.entities())
    pairs: list[TrainingPair] = []
    skipped = 0
    for summary in summaries:
        summary_tokens = tokenize(summary.text)
        query = vectorize(model, summary_tokens)
        if query.norm == 0.0:
            skipped += 1
            continue
        scores = index.scores_against(query)
        ranked: list[tuple[float, str, list[tuple[str, float]]]] = []
        for entity_id in entity_ids:
            if entity_id == summary.entity_id:
                continue
            rows = index.rows_for_entity(entity_id)
            sub = scores[rows]
            ids = index._doc_id_arr[rows]
            order = np.lexsort((ids, -sub))[: cfg.n_sources]
            entity_score = float(sum(float(sub[k]) for k in order))
            sources = [(str(ids[k]), float(sub[k])) for k in order]
            ranked.append((entity_score, entity_id, sources))
        ranked.sort(key=lambda item: (-item[0], item[1]))
        for entity_score, entity_id, sources in ranked[: cfg.noisy_pairs_per_summary]:
            pairs.append(
                TrainingPair(
                    pair_id=f"noisy-{summary.summary_id}-{entity_id}",
                    summary_id=summary.summary_id,
                    summary_text=summary.text,
                    summary_tokens=summary_tokens,
                    source_review_ids=[doc_id for doc_id, _ in sources],
                    source_texts=[text_of[doc_id] for doc_id, _ in sources],
                    score=entity_score,
                    kind="noisy",
                )
            )
    return pairs, skipped


def pair_to_obj(pair: TrainingPair) -> dict:
    obj = {
        "pair_id": pair.pair_id,
        "kind": pair.kind,
        "summary_id": pair.summary_id,
        "summary_text": pair.summary_text,
        "summary_tokens": list(pair.summary_tokens.tokens),
        "source_review_ids": list(pair.source_review_ids),
        "source_texts": list(pair.source_texts),
        "score": pair.score,
    }
    if pair.mask is not None:
        obj["mask"] = list(pair.mask.values)
        obj["mask_mode"] = pair.mask.mode.value
    return obj


def pair_from_obj(obj: dict, path="<pairs>", line_no=0) -> TrainingPair:
    tokens = TokenSeq([str(t) for t in obj["summary_tokens"]])
    mask = None
    mask_mode = obj.get("mask_mode")
    if "mask" in obj:
        values = [int(v) for v in obj["mask"]]
        if len(values) != len(tokens.tokens):
            raise ValidationError(
                f"{path}:{line_no}: mask length {len(values)} != "
                f"summary token count {len(tokens.tokens)}"
            )
        mask = SupervisionMask(values, AlignmentMode(mask_mode or "none"))
    return TrainingPair(
        pair_id=str(obj["pair_id"]),
        summary_id=str(obj["summary_id"]),
        summary_text=str(obj["summary_text"]),
        summary_tokens=tokens,
        source_review_ids=[str(s) for s in obj["source_review_ids"]],
        source_texts=[str(s) for s in obj["source_texts"]],
        score=float(obj["score"]),
        kind=str(obj["kind"]),
        mask=mask,
        mask_mode=mask_mode,
    )


def write_pairs(path, pairs: list[TrainingPair], cfg_hash: str, seed: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_jsonl_header(fh, cfg_hash, seed)
        for pair in pairs:
            fh.write(json.dumps(pair_to_obj(pair), ensure_ascii=False) + "\n")


def read_pairs(path) -> list[TrainingPair]:
    return [pair_from_obj(obj, path, ln) for ln, obj in iter_jsonl(path)]
