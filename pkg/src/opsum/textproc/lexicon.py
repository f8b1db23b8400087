"""Synonym lexicon: flat synset file -> lemma lookup table.

File format: UTF-8 text, one synset per line, lemmas separated by
whitespace, ``#`` lines and blank lines ignored. A synset dump from any
public lexical database can be flattened into this shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from opsum.errors import ParseError


@dataclass
class SynonymLexicon:
    synsets: list[frozenset[str]] = field(default_factory=list)
    lemma_index: dict[str, set[int]] = field(default_factory=dict)

    def synset_ids(self, lemma: str) -> set[int]:
        return self.lemma_index.get(lemma, set())

    def are_synonyms(self, a: str, b: str) -> bool:
        """True when some synset contains both lemmas."""
        ids = self.lemma_index.get(a)
        if not ids:
            return False
        other = self.lemma_index.get(b)
        if not other:
            return False
        return not ids.isdisjoint(other)

    def __len__(self) -> int:
        return len(self.synsets)


def load_synonyms(path) -> SynonymLexicon:
    """Parse a synset file into a :class:`SynonymLexicon`."""
    lexicon = SynonymLexicon()
    with open(path, "rb") as fh:
        for line_no, raw in enumerate(fh, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError(path, line_no, f"invalid UTF-8: {exc}") from exc
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            lemmas = frozenset(tok.lower() for tok in line.split())
            synset_id = len(lexicon.synsets)
            lexicon.synsets.append(lemmas)
            for lemma in lemmas:
                lexicon.lemma_index.setdefault(lemma, set()).add(synset_id)
    return lexicon
