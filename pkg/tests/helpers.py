"""Shared builders for randomized corpora used across the test suite."""

from __future__ import annotations

import json
import random

from opsum.corpus import Entity, EntityGroup, Review, Summary


def random_text(rng: random.Random, vocab: list[str], lo: int = 4, hi: int = 14) -> str:
    return " ".join(rng.choices(vocab, k=rng.randint(lo, hi)))


def word_vocab(size: int, prefix: str = "w") -> list[str]:
    return [f"{prefix}{i}" for i in range(size)]


def make_corpus(
    rng: random.Random,
    n_entities: int,
    reviews_per_entity: int,
    vocab: list[str],
    stars: int = 5,
) -> list[Review]:
    reviews = []
    for e in range(n_entities):
        for r in range(reviews_per_entity):
            reviews.append(
                Review(
                    review_id=f"e{e:04d}r{r:04d}",
                    entity_id=f"e{e:04d}",
                    stars=stars,
                    text=random_text(rng, vocab),
                )
            )
    return reviews


def make_groups(reviews: list[Review]) -> list[EntityGroup]:
    by_entity: dict[str, list[Review]] = {}
    for r in reviews:
        by_entity.setdefault(r.entity_id, []).append(r)
    return [EntityGroup(eid, by_entity[eid]) for eid in sorted(by_entity)]


def write_reviews_jsonl(path, reviews: list[Review]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in reviews:
            fh.write(json.dumps({
                "review_id": r.review_id,
                "entity_id": r.entity_id,
                "stars": r.stars,
                "text": r.text,
            }) + "\n")


def write_entities_jsonl(path, entities: list[Entity]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entities:
            fh.write(json.dumps({
                "entity_id": e.entity_id,
                "categories": sorted(e.categories),
                "avg_stars": e.avg_stars,
            }) + "\n")


def write_summaries_jsonl(path, summaries: list[Summary]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in summaries:
            fh.write(json.dumps({
                "summary_id": s.summary_id,
                "entity_id": s.entity_id,
                "text": s.text,
            }) + "\n")
