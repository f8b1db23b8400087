"""Synthetic corpus generator with controllable supervision noise.

Each entity gets a handful of templated reviews. A pair's target starts
as an exact copy of its first source review; content slots (dish and
adjective positions) are then replaced by words from a noise vocabulary
that never occurs in any review. The replacement probability is the
noise rate, so the ground-truth mask is known by construction: 1 for
kept tokens (they appear verbatim in the sources), 0 for noise tokens
(they cannot appear in any source). Which noise word a given entity slot
gets is a fixed function of the entity, which makes the corruption
learnable rather than pure label shuffling.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path


def _rng(*parts) -> random.Random:
    """Process-independent seeded stream (str hashes are randomized)."""
    key = ":".join(str(p) for p in parts).encode("utf-8")
    return random.Random(int.from_bytes(hashlib.sha256(key).digest()[:8], "big"))

DISH = "<dish>"
ADJ = "<adj>"
NOUN = "<noun>"

DEFAULT_GRAMMAR = {
    "dishes": [f"dish{i}" for i in range(40)],
    "adjectives": ["great", "cozy", "fresh", "tasty", "warm", "quick",
                   "crispy", "quiet", "friendly", "fine"],
    "nouns": ["service", "spot", "staff", "place", "counter", "menu"],
    "noise": [f"zz{i}" for i in range(8)],
    "templates": [
        ["the", DISH, "was", ADJ, "."],
        [ADJ, DISH, "and", ADJ, DISH, "."],
        [DISH, "with", ADJ, DISH, "."],
        ["the", NOUN, "had", DISH, "and", DISH, "."],
    ],
}

CONTENT_SLOTS = {DISH, ADJ}


@dataclass
class SynthSpec:
    entity_count: int = 2000
    val_entities: int = 200
    reviews_per_entity: int = 4
    sources_per_pair: int = 3
    noise_rate: float = 0.4
    seed: int = 0
    grammar: dict = field(default_factory=lambda: DEFAULT_GRAMMAR)

    def __post_init__(self):
        for key in ("dishes", "adjectives", "nouns", "noise", "templates"):
            if not self.grammar.get(key):
                raise ValueError(f"degenerate grammar: empty {key!r}")
        if any(len(t) == 0 for t in self.grammar["templates"]):
            raise ValueError("degenerate grammar: empty template")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must be in [0, 1]")
        if self.reviews_per_entity < self.sources_per_pair:
            raise ValueError("need at least sources_per_pair reviews per entity")


def _render(rng: random.Random, template: list[str], dishes: list[str], grammar: dict):
    tokens, content = [], []
    for slot in template:
        if slot == DISH:
            tokens.append(rng.choice(dishes))
            content.append(True)
        elif slot == ADJ:
            tokens.append(rng.choice(grammar["adjectives"]))
            content.append(True)
        elif slot == NOUN:
            tokens.append(rng.choice(grammar["nouns"]))
            content.append(False)
        else:
            tokens.append(slot)
            content.append(False)
    return tokens, content


def _entity_records(spec: SynthSpec, entity_idx: int, noise_rate: float):
    """Reviews plus one (possibly noised) pair for a single entity.

    Validation entities (indices past entity_count) are twins of a
    training entity: same dish combination and the same review texts
    under fresh ids, paired with the clean (uncorrupted) summary. Scoring
    against clean references on inputs the model trained noisily on is
    what isolates the supervision effect: a model that absorbed the noise
    reproduces it here and loses ROUGE, a masked model does not.
    """
    grammar = spec.grammar
    entity_id = f"ent{entity_idx:05d}"
    canonical = entity_idx % spec.entity_count
    rng = _rng(spec.seed, "entity", canonical)
    dishes = rng.sample(grammar["dishes"], min(3, len(grammar["dishes"])))
    reviews = []
    rendered = []
    for r in range(spec.reviews_per_entity):
        template = rng.choice(grammar["templates"])
        tokens, content = _render(rng, template, dishes, grammar)
        rendered.append((tokens, content))
        reviews.append({
            "review_id": f"{entity_id}r{r:02d}",
            "entity_id": entity_id,
            "stars": 5,
            "text": " ".join(tokens),
        })

    base_tokens, base_content = rendered[0]
    summary_tokens: list[str] = []
    mask: list[int] = []
    # One noise word per entity: the corruption is a learnable function of
    # the entity, which is what lets an unconstrained model overfit it. A
    # corrupted slot emits a three-token noise span, deepening the damage
    # a fully memorized summary does against the clean reference.
    noise_word = _rng(spec.seed, "noise", canonical).choice(grammar["noise"])
    noise_rng = _rng(spec.seed, "place", canonical)
    for token, is_content in zip(base_tokens, base_content):
        if is_content and noise_rng.random() < noise_rate:
            summary_tokens.extend([noise_word] * 3)
            mask.extend([0, 0, 0])
        else:
            summary_tokens.append(token)
            mask.append(1)

    summary = {
        "summary_id": f"sum{entity_idx:05d}",
        "entity_id": entity_id,
        "text": " ".join(summary_tokens),
    }
    sources = reviews[: spec.sources_per_pair]
    pair = {
        "pair_id": f"synth-{entity_id}",
        "kind": "supervised",
        "summary_id": summary["summary_id"],
        "summary_text": summary["text"],
        "summary_tokens": summary_tokens,
        "source_review_ids": [r["review_id"] for r in sources],
        "source_texts": [r["text"] for r in sources],
        "score": sum(mask) / len(mask),
        "mask": mask,
        "mask_mode": "word",
    }
    return reviews, summary, pair


def generate_synthetic(spec: SynthSpec, out_dir) -> dict[str, Path]:
    """Write reviews/summaries/pair files; returns the path map.

    Train pairs carry the configured noise rate; validation pairs come
    from held-out entities and are always clean (all-ones masks).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "reviews": out / "reviews.jsonl",
        "summaries": out / "summaries.jsonl",
        "train_pairs": out / "train_pairs.jsonl",
        "val_pairs": out / "val_pairs.jsonl",
    }
    header = {"_header": {"tool": "toytrainer", "seed": spec.seed,
                          "noise_rate": spec.noise_rate}}
    with open(paths["reviews"], "w", encoding="utf-8") as rev_fh, \
         open(paths["summaries"], "w", encoding="utf-8") as sum_fh, \
         open(paths["train_pairs"], "w", encoding="utf-8") as train_fh, \
         open(paths["val_pairs"], "w", encoding="utf-8") as val_fh:
        train_fh.write(json.dumps(header, sort_keys=True) + "\n")
        val_fh.write(json.dumps(header, sort_keys=True) + "\n")
        total = spec.entity_count + spec.val_entities
        for entity_idx in range(total):
            is_val = entity_idx >= spec.entity_count
            noise = 0.0 if is_val else spec.noise_rate
            reviews, summary, pair = _entity_records(spec, entity_idx, noise)
            for review in reviews:
                rev_fh.write(json.dumps(review) + "\n")
            sum_fh.write(json.dumps(summary) + "\n")
            (val_fh if is_val else train_fh).write(json.dumps(pair) + "\n")
    return paths
