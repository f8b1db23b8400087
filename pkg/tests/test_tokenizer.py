import string

from hypothesis import given, strategies as st

from opsum.textproc import tokenize

TEXT_ALPHABET = string.ascii_letters + string.digits + " \t\n.,!?'-()&é"


def test_word_and_punct_split():
    assert tokenize("Great sushi!").tokens == ["great", "sushi", "!"]


def test_empty_string():
    assert tokenize("").tokens == []


def test_each_punct_char_is_own_token():
    assert tokenize("sushi-ya's").tokens == ["sushi", "-", "ya", "'", "s"]


def test_offsets_match_source_slices():
    text = "Chef's omakase, 10/10 -- worth it!"
    seq = tokenize(text)
    for token, (start, end) in zip(seq.tokens, seq.offsets):
        assert token == text[start:end].lower()


def test_offsets_strictly_increasing_and_disjoint():
    seq = tokenize("a bb  ccc!! d")
    previous_end = 0
    for start, end in seq.offsets:
        assert start >= previous_end
        assert end > start
        previous_end = end


def test_unicode_letters_stay_in_word_tokens():
    assert tokenize("Déjà Vu!").tokens == ["déjà", "vu", "!"]


@given(st.text(alphabet=TEXT_ALPHABET, max_size=80))
def test_roundtrip_reconstructs_lowercased_content(text):
    seq = tokenize(text)
    joined = "".join(seq.tokens)
    expected = "".join(ch.lower() for ch in text if not ch.isspace())
    assert joined == expected
    for token, (start, end) in zip(seq.tokens, seq.offsets):
        assert token == text[start:end].lower()
