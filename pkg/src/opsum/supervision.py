"""Token-level alignment masks and the masked log-likelihood.

A summary token counts as aligned when it appears in the union of source
tokens (word), when its stem appears among source stems (word_stem), or
when it shares a synset with any source token (word_stem_synonym). Each
mode's predicate is a superset of the previous one, so masks can only
gain ones as the criterion is relaxed. The loss helper is a pure function
over caller-supplied log-probabilities; no model runtime is involved.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from opsum.errors import ValidationError
from opsum.textproc.lexicon import SynonymLexicon
from opsum.textproc.stemmer import stem
from opsum.textproc.tokenizer import TokenSeq


class AlignmentMode(enum.Enum):
    NONE = "none"
    WORD = "word"
    WORD_STEM = "word_stem"
    WORD_STEM_SYNONYM = "word_stem_synonym"

    @property
    def rank(self) -> int:
        return _MODE_ORDER.index(self)

    def __ge__(self, other: "AlignmentMode") -> bool:
        return self.rank >= other.rank


_MODE_ORDER = [
    AlignmentMode.NONE,
    AlignmentMode.WORD,
    AlignmentMode.WORD_STEM,
    AlignmentMode.WORD_STEM_SYNONYM,
]


@dataclass(frozen=True)
class SupervisionMask:
    values: list[int]
    mode: AlignmentMode

    def __len__(self) -> int:
        return len(self.values)


def align_mask(
    summary_tokens: TokenSeq,
    source_tokens: list[TokenSeq],
    mode: AlignmentMode,
    lexicon: SynonymLexicon | None = None,
) -> SupervisionMask:
    """Compute the per-token 0/1 supervision mask for a summary.

    Matching is set membership against the union of all source tokens;
    position plays no role. The synonym criterion needs a lexicon.
    """
    if mode is AlignmentMode.NONE:
        return SupervisionMask([1] * len(summary_tokens), mode)
    if mode is AlignmentMode.WORD_STEM_SYNONYM and lexicon is None:
        raise ValidationError("synonym matching requires a lexicon")

    source_words: set[str] = set()
    for seq in source_tokens:
        source_words.update(seq.tokens)
    source_stems: set[str] = set()
    if mode >= AlignmentMode.WORD_STEM:
        source_stems = {stem(tok) for tok in source_words}
    source_synsets: set[int] = set()
    if mode is AlignmentMode.WORD_STEM_SYNONYM:
        for tok in source_words:
            source_synsets.update(lexicon.synset_ids(tok))

    values = []
    for tok in summary_tokens.tokens:
        aligned = tok in source_words
        if not aligned and mode >= AlignmentMode.WORD_STEM:
            aligned = stem(tok) in source_stems
        if not aligned and mode is AlignmentMode.WORD_STEM_SYNONYM:
            aligned = not source_synsets.isdisjoint(lexicon.synset_ids(tok))
        values.append(1 if aligned else 0)
    return SupervisionMask(values, mode)


def mask_coverage(mask: SupervisionMask) -> float:
    """Fraction of summary tokens that received supervision."""
    if not mask.values:
        raise ValidationError("coverage of an empty mask is undefined")
    return sum(mask.values) / len(mask.values)


def masked_nll(token_logprobs: list[float], mask: SupervisionMask) -> float:
    """Negative log-likelihood restricted to masked-in positions.

    With an all-ones mask this equals the plain NLL of the sequence,
    bit for bit, because each term is multiplied by exactly 1.0.
    """
    if len(token_logprobs) != len(mask.values):
        raise ValidationError(
            f"logprobs/mask length mismatch: {len(token_logprobs)} != {len(mask.values)}"
        )
    total = 0.0
    for lp, m in zip(token_logprobs, mask.values):
        if lp > 0.0:
            raise ValidationError(f"log-probability must be <= 0, got {lp}")
        total += m * lp
    return -total
