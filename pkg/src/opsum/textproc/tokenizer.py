"""Lowercasing word/punctuation tokenizer with source offsets.

Rules: maximal runs of letters or digits become word tokens, every other
non-whitespace character is a single-character token, whitespace is
dropped. Offsets are (start, end) indices into the original string so the
lowercased slice at ``offsets[i]`` reproduces ``tokens[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TokenSeq:
    tokens: list[str]
    offsets: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def tokenize(text: str) -> TokenSeq:
    """Split ``text`` into lowercase word and punctuation tokens."""
    tokens: list[str] = []
    offsets: list[tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalnum():
            j = i + 1
            while j < n and text[j].isalnum():
                j += 1
        else:
            j = i + 1
        tokens.append(text[i:j].lower())
        offsets.append((i, j))
        i = j
    return TokenSeq(tokens, offsets)
