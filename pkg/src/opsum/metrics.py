"""Evaluation layer: ROUGE-1/2/L, novel n-gram ratios, the greedy
extractive oracle, and coverage-maximizing source selection.

All metrics run on this package's own lowercase tokenizer output with no
stemming or stopword removal, so scores are self-contained and exactly
reproducible (they are not comparable to any external ROUGE toolkit).
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from opsum.corpus import Review
from opsum.errors import ValidationError
from opsum.textproc.tokenizer import TokenSeq, tokenize

SENTENCE_TERMINATORS = {".", "!", "?"}


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(hyp: TokenSeq, ref: TokenSeq, n: int) -> RougeScore:
    """Clipped n-gram overlap precision/recall/F1."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    hyp_grams = _ngrams(hyp.tokens, n)
    ref_grams = _ngrams(ref.tokens, n)
    overlap = sum(min(count, ref_grams[gram]) for gram, count in hyp_grams.items())
    hyp_total = sum(hyp_grams.values())
    ref_total = sum(ref_grams.values())
    p = overlap / hyp_total if hyp_total else 0.0
    r = overlap / ref_total if ref_total else 0.0
    return RougeScore(p, r, _f1(p, r))


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l(hyp: TokenSeq, ref: TokenSeq) -> RougeScore:
    """Longest-common-subsequence precision/recall/F1."""
    lcs = _lcs_length(hyp.tokens, ref.tokens)
    p = lcs / len(hyp.tokens) if hyp.tokens else 0.0
    r = lcs / len(ref.tokens) if ref.tokens else 0.0
    return RougeScore(p, r, _f1(p, r))


def novel_ngram_ratio(summary: TokenSeq, sources: list[TokenSeq], n: int) -> float:
    """Percentage of distinct summary n-grams absent from all sources."""
    if len(summary.tokens) < n:
        raise ValidationError(
            f"summary has {len(summary.tokens)} tokens, need at least {n}"
        )
    summary_grams = set(_ngrams(summary.tokens, n))
    source_grams: set[tuple[str, ...]] = set()
    for src in sources:
        source_grams.update(_ngrams(src.tokens, n))
    novel = sum(1 for gram in summary_grams if gram not in source_grams)
    return 100.0 * novel / len(summary_grams)


def split_sentences(seq: TokenSeq) -> list[TokenSeq]:
    """Split a token sequence at sentence-terminator tokens (. ! ?).

    A run of terminators closes one sentence; empty sentences are dropped.
    """
    sentences: list[TokenSeq] = []
    start = 0
    i = 0
    n = len(seq.tokens)
    while i < n:
        if seq.tokens[i] in SENTENCE_TERMINATORS:
            while i + 1 < n and seq.tokens[i + 1] in SENTENCE_TERMINATORS:
                i += 1
            sentences.append(
                TokenSeq(seq.tokens[start : i + 1], seq.offsets[start : i + 1])
            )
            start = i + 1
        i += 1
    if start < n:
        sentences.append(TokenSeq(seq.tokens[start:], seq.offsets[start:]))
    return sentences


@dataclass(frozen=True)
class OracleResult:
    selected_sentence_indices: list[int]
    rouge1: RougeScore
    rouge2: RougeScore
    rouge_l: RougeScore


def _concat(seqs: list[TokenSeq]) -> TokenSeq:
    tokens: list[str] = []
    for seq in seqs:
        tokens.extend(seq.tokens)
    return TokenSeq(tokens)


def _concat_subset(seqs: list[TokenSeq], indices: list[int]) -> TokenSeq:
    # Canonical order: the objective depends on the selected set only,
    # not on the order greedy happened to pick it in.
    return _concat([seqs[i] for i in sorted(indices)])


def extractive_oracle(
    source_sentences: list[TokenSeq],
    ref: TokenSeq,
    max_sentences: int,
) -> OracleResult:
    """Greedy sentence selection maximizing ROUGE-1 F1 + ROUGE-2 F1.

    Sentences are added one at a time; selection stops when no remaining
    sentence strictly improves the objective or the budget is spent. The
    selection is scored as a set: concatenation always follows original
    sentence order.
    """
    if not source_sentences:
        raise ValidationError("extractive oracle needs at least one source sentence")
    if max_sentences < 1:
        raise ValidationError(f"max_sentences must be >= 1, got {max_sentences}")
    selected: list[int] = []
    best_score = 0.0
    while len(selected) < max_sentences:
        best_idx = -1
        for i in range(len(source_sentences)):
            if i in selected:
                continue
            candidate = _concat_subset(source_sentences, selected + [i])
            score = rouge_n(candidate, ref, 1).f1 + rouge_n(candidate, ref, 2).f1
            if score > best_score:
                best_score = score
                best_idx = i
        if best_idx < 0:
            break
        selected.append(best_idx)
    final = _concat_subset(source_sentences, selected)
    return OracleResult(
        selected_sentence_indices=selected,
        rouge1=rouge_n(final, ref, 1),
        rouge2=rouge_n(final, ref, 2),
        rouge_l=rouge_l(final, ref),
    )


def coverage_score(selection: list[TokenSeq], ref: TokenSeq) -> float:
    """ROUGE-1 recall + ROUGE-2 recall of the concatenated selection."""
    joined = _concat(selection)
    return rouge_n(joined, ref, 1).recall + rouge_n(joined, ref, 2).recall


def greedy_coverage_selection(
    candidate_tokens: list[TokenSeq],
    ref: TokenSeq,
    token_budget: int,
) -> tuple[list[int], list[float]]:
    """Greedy coverage maximization under a total-token budget.

    Returns the chosen candidate indices in selection order plus the
    coverage after each step (non-decreasing by construction). Like the
    oracle, coverage treats the selection as a set: candidates are
    concatenated in input order when scored.
    """
    if token_budget < 1:
        raise ValidationError(f"token_budget must be >= 1, got {token_budget}")
    selected: list[int] = []
    trace: list[float] = []
    spent = 0
    current = 0.0
    while True:
        best_idx = -1
        best_cov = current
        for i, cand in enumerate(candidate_tokens):
            if i in selected or spent + len(cand.tokens) > token_budget:
                continue
            cov = coverage_score(
                [candidate_tokens[j] for j in sorted(selected + [i])], ref
            )
            if cov > best_cov:
                best_cov = cov
                best_idx = i
        if best_idx < 0:
            break
        selected.append(best_idx)
        spent += len(candidate_tokens[best_idx].tokens)
        current = best_cov
        trace.append(current)
    return selected, trace


def select_sources_by_coverage(
    candidates: list[Review],
    ref: TokenSeq,
    token_budget: int,
    seed: int,
) -> list[Review]:
    """Pick source reviews greedily by coverage, then shuffle them.

    The shuffle removes selection-order bias and is deterministic for a
    given seed.
    """
    tokens = [tokenize(c.text) for c in candidates]
    selected, _ = greedy_coverage_selection(tokens, ref, token_budget)
    chosen = [candidates[i] for i in selected]
    random.Random(seed).shuffle(chosen)
    return chosen


@dataclass
class DatasetStats:
    """Per-dataset table: lengths, novelty, and oracle quality."""

    examples: int
    mean_source_tokens: float
    mean_summary_tokens: float
    novel_ngram_pct: dict[int, float]
    novel_ngram_examples: dict[int, int]
    oracle_rouge1_f1: float
    oracle_rouge2_f1: float
    oracle_rouge_l_f1: float

    def as_dict(self) -> dict:
        return {
            "examples": self.examples,
            "src_len": self.mean_source_tokens,
            "tgt_len": self.mean_summary_tokens,
            "novel_ngram_pct": {str(n): v for n, v in self.novel_ngram_pct.items()},
            "novel_ngram_examples": {
                str(n): v for n, v in self.novel_ngram_examples.items()
            },
            "oracle": {
                "rouge1_f1": self.oracle_rouge1_f1,
                "rouge2_f1": self.oracle_rouge2_f1,
                "rouge_l_f1": self.oracle_rouge_l_f1,
            },
        }

    def as_text(self) -> str:
        headers = [
            "src_len", "tgt_len",
            "novel_1gram%", "novel_2gram%", "novel_3gram%", "novel_4gram%",
            "oracle_R1", "oracle_R2", "oracle_RL",
        ]
        values = [
            f"{self.mean_source_tokens:.1f}",
            f"{self.mean_summary_tokens:.1f}",
            *(f"{self.novel_ngram_pct.get(n, 0.0):.2f}" for n in (1, 2, 3, 4)),
            f"{100 * self.oracle_rouge1_f1:.2f}",
            f"{100 * self.oracle_rouge2_f1:.2f}",
            f"{100 * self.oracle_rouge_l_f1:.2f}",
        ]
        widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
        head = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
        row = "  ".join(v.ljust(w) for v, w in zip(values, widths))
        return f"{head}\n{row}"


def compute_dataset_stats(
    examples: list[tuple[TokenSeq, list[TokenSeq]]],
    max_oracle_sentences: int = 16,
) -> DatasetStats:
    """Aggregate length, novelty, and oracle statistics over a dataset.

    ``examples`` pairs each summary with its source token sequences.
    Examples whose summary is shorter than n are left out of the n-gram
    novelty average (their count is reported separately).
    """
    if not examples:
        raise ValidationError("cannot compute stats for an empty dataset")
    src_total = 0
    tgt_total = 0
    novel_sums = {n: 0.0 for n in (1, 2, 3, 4)}
    novel_counts = {n: 0 for n in (1, 2, 3, 4)}
    oracle_f1s = [0.0, 0.0, 0.0]
    for summary, sources in examples:
        src_total += sum(len(s.tokens) for s in sources)
        tgt_total += len(summary.tokens)
        for n in (1, 2, 3, 4):
            if len(summary.tokens) >= n:
                novel_sums[n] += novel_ngram_ratio(summary, sources, n)
                novel_counts[n] += 1
        sentences = [sent for src in sources for sent in split_sentences(src)]
        if sentences:
            result = extractive_oracle(sentences, summary, max_oracle_sentences)
            oracle_f1s[0] += result.rouge1.f1
            oracle_f1s[1] += result.rouge2.f1
            oracle_f1s[2] += result.rouge_l.f1
    count = len(examples)
    return DatasetStats(
        examples=count,
        mean_source_tokens=src_total / count,
        mean_summary_tokens=tgt_total / count,
        novel_ngram_pct={
            n: (novel_sums[n] / novel_counts[n]) if novel_counts[n] else 0.0
            for n in (1, 2, 3, 4)
        },
        novel_ngram_examples=novel_counts,
        oracle_rouge1_f1=oracle_f1s[0] / count,
        oracle_rouge2_f1=oracle_f1s[1] / count,
        oracle_rouge_l_f1=oracle_f1s[2] / count,
    )
