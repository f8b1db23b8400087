"""Review corpus ingestion, preprocessing filters, and entity grouping.

The filters mirror the construction of the review corpus used for pair
building: keep only entities in allowed categories with a high enough
average rating, keep only reviews at the required star value, and drop
entities left with too few reviews. Entity-level attributes come from the
entity records, not from recomputation over surviving reviews.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from opsum.artifacts import iter_jsonl
from opsum.errors import ParseError, ValidationError


@dataclass(frozen=True)
class Review:
    review_id: str
    entity_id: str
    stars: int
    text: str


@dataclass(frozen=True)
class Entity:
    entity_id: str
    categories: frozenset[str]
    avg_stars: float


@dataclass(frozen=True)
class EntityGroup:
    entity_id: str
    reviews: list[Review]


@dataclass(frozen=True)
class Summary:
    summary_id: str
    entity_id: str
    text: str


@dataclass
class FilterConfig:
    min_avg_stars: float = 4.0
    required_review_stars: int = 5
    min_reviews_per_entity: int = 10
    allowed_categories: frozenset[str] = frozenset({"restaurant", "food"})
    excluded_entity_ids: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.min_reviews_per_entity < 1:
            raise ValidationError("min_reviews_per_entity must be >= 1")
        if not self.allowed_categories:
            raise ValidationError("allowed_categories must be non-empty")


# Drop rules in evaluation order; the report lists them in this order.
DROP_RULES = (
    "unresolvable_entity",
    "excluded_entity",
    "category_mismatch",
    "low_avg_stars",
    "wrong_star_rating",
    "entity_below_min_reviews",
)


@dataclass
class FilterReport:
    counts: dict[str, int] = field(
        default_factory=lambda: {rule: 0 for rule in DROP_RULES}
    )
    total_in: int = 0
    total_out: int = 0

    def as_text(self) -> str:
        lines = [f"{rule}: {self.counts[rule]}" for rule in DROP_RULES]
        lines.append(f"total_in: {self.total_in}")
        lines.append(f"total_out: {self.total_out}")
        return "\n".join(lines)


def _field(obj, path, line_no, name, types):
    if name not in obj:
        raise ParseError(path, line_no, f"missing field {name!r}")
    value = obj[name]
    if not isinstance(value, types) or isinstance(value, bool):
        raise ParseError(path, line_no, f"field {name!r} has wrong type")
    return value


def load_reviews(path) -> list[Review]:
    """Read review JSONL records in file order."""
    reviews = []
    seen = set()
    for line_no, obj in iter_jsonl(path):
        review_id = _field(obj, path, line_no, "review_id", str)
        entity_id = _field(obj, path, line_no, "entity_id", str)
        stars = _field(obj, path, line_no, "stars", int)
        text = _field(obj, path, line_no, "text", str)
        if stars < 1 or stars > 5:
            raise ValidationError(f"{path}:{line_no}: stars must be in [1,5], got {stars}")
        if not text.strip():
            raise ValidationError(f"{path}:{line_no}: empty review text")
        if review_id in seen:
            raise ValidationError(f"{path}:{line_no}: duplicate review_id {review_id!r}")
        seen.add(review_id)
        reviews.append(Review(review_id, entity_id, stars, text))
    return reviews


def load_entities(path) -> dict[str, Entity]:
    """Read entity JSONL records into a lookup table keyed by entity_id."""
    entities: dict[str, Entity] = {}
    for line_no, obj in iter_jsonl(path):
        entity_id = _field(obj, path, line_no, "entity_id", str)
        categories = _field(obj, path, line_no, "categories", list)
        avg_stars = _field(obj, path, line_no, "avg_stars", (int, float))
        if not all(isinstance(c, str) for c in categories):
            raise ParseError(path, line_no, "categories must be a list of strings")
        if avg_stars < 1 or avg_stars > 5:
            raise ValidationError(
                f"{path}:{line_no}: avg_stars must be in [1,5], got {avg_stars}"
            )
        if entity_id in entities:
            raise ValidationError(f"{path}:{line_no}: duplicate entity_id {entity_id!r}")
        entities[entity_id] = Entity(
            entity_id=entity_id,
            categories=frozenset(c.lower() for c in categories),
            avg_stars=float(avg_stars),
        )
    return entities


def load_summaries(path) -> list[Summary]:
    """Read summary JSONL records in file order."""
    summaries = []
    seen = set()
    for line_no, obj in iter_jsonl(path):
        summary_id = _field(obj, path, line_no, "summary_id", str)
        entity_id = _field(obj, path, line_no, "entity_id", str)
        text = _field(obj, path, line_no, "text", str)
        if not text.strip():
            raise ValidationError(f"{path}:{line_no}: empty summary text")
        if summary_id in seen:
            raise ValidationError(f"{path}:{line_no}: duplicate summary_id {summary_id!r}")
        seen.add(summary_id)
        summaries.append(Summary(summary_id, entity_id, text))
    return summaries


def filter_corpus(
    reviews: list[Review],
    entities: dict[str, Entity],
    cfg: FilterConfig,
) -> tuple[list[Review], FilterReport]:
    """Apply all preprocessing filters; returns survivors in input order.

    Per-review rules run first (first failing rule is the one counted),
    then entities left with fewer than ``min_reviews_per_entity`` reviews
    are dropped entirely.
    """
    report = FilterReport()
    report.total_in = len(reviews)
    survivors: list[Review] = []
    for review in reviews:
        entity = entities.get(review.entity_id)
        if entity is None:
            report.counts["unresolvable_entity"] += 1
            continue
        if review.entity_id in cfg.excluded_entity_ids:
            report.counts["excluded_entity"] += 1
            continue
        if not (entity.categories & cfg.allowed_categories):
            report.counts["category_mismatch"] += 1
            continue
        if entity.avg_stars < cfg.min_avg_stars:
            report.counts["low_avg_stars"] += 1
            continue
        if review.stars != cfg.required_review_stars:
            report.counts["wrong_star_rating"] += 1
            continue
        survivors.append(review)

    sizes: dict[str, int] = {}
    for review in survivors:
        sizes[review.entity_id] = sizes.get(review.entity_id, 0) + 1
    kept = [r for r in survivors if sizes[r.entity_id] >= cfg.min_reviews_per_entity]
    report.counts["entity_below_min_reviews"] = len(survivors) - len(kept)
    report.total_out = len(kept)
    return kept, report


def group_by_entity(reviews: list[Review]) -> list[EntityGroup]:
    """Partition reviews into per-entity groups, sorted by entity_id."""
    by_entity: dict[str, list[Review]] = {}
    for review in reviews:
        by_entity.setdefault(review.entity_id, []).append(review)
    return [
        EntityGroup(entity_id=eid, reviews=by_entity[eid])
        for eid in sorted(by_entity)
    ]
