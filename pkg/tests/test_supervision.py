import random

import pytest

from opsum.errors import ValidationError
from opsum.supervision import (
    AlignmentMode,
    SupervisionMask,
    align_mask,
    mask_coverage,
    masked_nll,
)
from opsum.textproc import load_synonyms, stem, tokenize
from opsum.textproc.lexicon import SynonymLexicon


def lexicon_from(text, tmp_path):
    path = tmp_path / "syn.txt"
    path.write_text(text)
    return load_synonyms(path)


def seqs(*texts):
    return [tokenize(t) for t in texts]


class TestAlignMask:
    def test_word_match_against_source_union(self):
        mask = align_mask(
            tokenize("great sushi here"),
            seqs("great fish", "fresh sushi daily"),
            AlignmentMode.WORD,
        )
        assert mask.values == [1, 1, 0]

    def test_stem_match_extends_word_match(self):
        summary = tokenize("running")
        sources = seqs("he runs daily")
        assert stem("running") == stem("runs") == "run"
        assert align_mask(summary, sources, AlignmentMode.WORD).values == [0]
        assert align_mask(summary, sources, AlignmentMode.WORD_STEM).values == [1]

    def test_synonym_match(self, tmp_path):
        lex = lexicon_from("delicious tasty yummy\n", tmp_path)
        mask = align_mask(
            tokenize("delicious"),
            seqs("very tasty place"),
            AlignmentMode.WORD_STEM_SYNONYM,
            lex,
        )
        assert mask.values == [1]

    def test_none_mode_is_all_ones(self):
        mask = align_mask(tokenize("anything at all"), [], AlignmentMode.NONE)
        assert mask.values == [1, 1, 1]
        assert mask.mode is AlignmentMode.NONE

    def test_synonym_mode_requires_lexicon(self):
        with pytest.raises(ValidationError):
            align_mask(tokenize("a"), seqs("b"), AlignmentMode.WORD_STEM_SYNONYM)

    def test_empty_summary_gives_empty_mask(self):
        mask = align_mask(tokenize(""), seqs("stuff"), AlignmentMode.WORD)
        assert mask.values == []

    def test_punctuation_aligns_by_exact_match(self):
        mask = align_mask(tokenize("good !"), seqs("really good food ."), AlignmentMode.WORD)
        assert mask.values == [1, 0]

    def test_copied_token_always_aligned(self):
        rng = random.Random(5)
        vocab = [f"t{i}" for i in range(30)]
        for _ in range(50):
            source = " ".join(rng.choices(vocab, k=12))
            copied = rng.choice(source.split())
            mask = align_mask(tokenize(copied), seqs(source), AlignmentMode.WORD)
            assert mask.values == [1]

    def test_mask_monotone_in_mode(self, tmp_path):
        lex = lexicon_from("hot warm\ncold chilly\nfast quick speedy\n", tmp_path)
        rng = random.Random(11)
        vocab = ["hot", "warm", "cold", "chilly", "fast", "quick", "runs",
                 "running", "eat", "eats", "spot", "!", "good"]
        for _ in range(200):
            summary = tokenize(" ".join(rng.choices(vocab, k=rng.randint(1, 8))))
            sources = seqs(" ".join(rng.choices(vocab, k=rng.randint(1, 12))))
            word = align_mask(summary, sources, AlignmentMode.WORD).values
            stems = align_mask(summary, sources, AlignmentMode.WORD_STEM).values
            syn = align_mask(summary, sources, AlignmentMode.WORD_STEM_SYNONYM, lex).values
            assert all(a <= b <= c for a, b, c in zip(word, stems, syn))
            cov = [sum(v) for v in (word, stems, syn)]
            assert cov[0] <= cov[1] <= cov[2]


class TestMaskCoverage:
    def test_half(self):
        assert mask_coverage(SupervisionMask([1, 1, 0, 0], AlignmentMode.WORD)) == 0.5

    def test_all_ones(self):
        assert mask_coverage(SupervisionMask([1, 1], AlignmentMode.NONE)) == 1.0

    def test_all_zeros(self):
        assert mask_coverage(SupervisionMask([0, 0, 0], AlignmentMode.WORD)) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            mask_coverage(SupervisionMask([], AlignmentMode.WORD))


class TestMaskedNll:
    def test_formula(self):
        mask = SupervisionMask([1, 0, 1], AlignmentMode.WORD)
        assert masked_nll([-1.0, -2.0, -3.0], mask) == 4.0

    def test_all_ones_equals_plain_nll(self):
        logprobs = [-1.0, -2.0, -3.0]
        mask = SupervisionMask([1, 1, 1], AlignmentMode.NONE)
        assert masked_nll(logprobs, mask) == 6.0
        assert masked_nll(logprobs, mask) == -sum(logprobs)

    def test_all_zeros_is_zero(self):
        mask = SupervisionMask([0, 0, 0], AlignmentMode.WORD)
        assert masked_nll([-1.0, -2.0, -3.0], mask) == 0.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            masked_nll([-1.0], SupervisionMask([1, 0], AlignmentMode.WORD))

    def test_positive_logprob_rejected(self):
        with pytest.raises(ValidationError):
            masked_nll([0.5], SupervisionMask([1], AlignmentMode.WORD))

    def test_linear_in_mask_for_disjoint_support(self):
        rng = random.Random(13)
        for _ in range(100):
            n = rng.randint(1, 20)
            logprobs = [-rng.random() * 5 for _ in range(n)]
            owner = [rng.randrange(2) for _ in range(n)]
            m1 = SupervisionMask([1 if o == 0 else 0 for o in owner], AlignmentMode.WORD)
            m2 = SupervisionMask([1 if o == 1 else 0 for o in owner], AlignmentMode.WORD)
            union = SupervisionMask([1] * n, AlignmentMode.NONE)
            total = masked_nll(logprobs, m1) + masked_nll(logprobs, m2)
            assert total == pytest.approx(masked_nll(logprobs, union), abs=1e-12)


def test_mode_ordering():
    order = [
        AlignmentMode.NONE,
        AlignmentMode.WORD,
        AlignmentMode.WORD_STEM,
        AlignmentMode.WORD_STEM_SYNONYM,
    ]
    for i, low in enumerate(order):
        for high in order[i:]:
            assert high >= low
