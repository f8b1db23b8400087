import pytest

from opsum.errors import ParseError
from opsum.textproc import load_synonyms


def test_shared_synset_id(tmp_path):
    path = tmp_path / "syn.txt"
    path.write_text("delicious tasty yummy\n")
    lex = load_synonyms(path)
    assert lex.synset_ids("tasty") == lex.synset_ids("delicious") == {0}
    assert lex.are_synonyms("tasty", "yummy")
    assert not lex.are_synonyms("tasty", "steak")


def test_empty_file(tmp_path):
    path = tmp_path / "syn.txt"
    path.write_text("")
    assert len(load_synonyms(path)) == 0


def test_comment_only_file(tmp_path):
    path = tmp_path / "syn.txt"
    path.write_text("# note\n")
    lex = load_synonyms(path)
    assert len(lex) == 0
    assert lex.lemma_index == {}


def test_lemma_in_multiple_synsets(tmp_path):
    path = tmp_path / "syn.txt"
    path.write_text("bright smart\nbright shiny\n")
    lex = load_synonyms(path)
    assert lex.synset_ids("bright") == {0, 1}
    assert lex.are_synonyms("smart", "bright")
    assert not lex.are_synonyms("smart", "shiny")


def test_lemmas_lowercased(tmp_path):
    path = tmp_path / "syn.txt"
    path.write_text("Tasty DELICIOUS\n")
    lex = load_synonyms(path)
    assert lex.are_synonyms("tasty", "delicious")


def test_lemma_index_consistent_with_synsets(tmp_path):
    path = tmp_path / "syn.txt"
    path.write_text("a b c\nb d\n# comment\ne f\n")
    lex = load_synonyms(path)
    for lemma, ids in lex.lemma_index.items():
        for synset_id in ids:
            assert lemma in lex.synsets[synset_id]


def test_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "syn.txt"
    path.write_bytes(b"good fine\n\xff\xfe broken\n")
    with pytest.raises(ParseError) as err:
        load_synonyms(path)
    assert err.value.line_no == 2
