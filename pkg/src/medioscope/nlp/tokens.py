"""Tokenizer: deterministic segmentation with character-offset spans.

URLs, @mentions and #hashtags stay single tokens; words split on whitespace
and punctuation boundaries; everything else (including inverted Spanish
punctuation) becomes one punctuation token per character. Token spans are
non-overlapping and strictly increasing, and each surface equals the source
slice at its span, so the input is reconstructible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

KIND_WORD = "word"
KIND_NUMBER = "number"
KIND_PUNCT = "punctuation"
KIND_URL = "url"
KIND_MENTION = "mention"
KIND_HASHTAG = "hashtag"


@dataclass
class Token:
    surface: str
    span: tuple[int, int]
    kind: str
    pos: Optional[str] = None
    lemma: Optional[str] = None


_SCANNER = re.compile(
    r"""(?P<url>https?://\S+)
      | (?P<mention>@\w+)
      | (?P<hashtag>\#\w+)
      | (?P<number>\d+(?:[.,]\d+)*)
      | (?P<word>[^\W\d_]+)
      | (?P<punct>[^\w\s]|_)
    """,
    re.VERBOSE,
)

# Sentence punctuation glued to the end of a URL is not part of it.
_URL_TRAILING = '.,;:!?"\')]}»'


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        match = _SCANNER.match(text, pos)
        if match is None:
            pos += 1  # whitespace or unmatched control char
            continue
        kind = match.lastgroup or KIND_PUNCT
        start, end = match.span()
        if kind == "url":
            while end > start and text[end - 1] in _URL_TRAILING:
                end -= 1
        surface = text[start:end]
        if not surface:
            pos += 1
            continue
        tokens.append(Token(surface=surface, span=(start, end), kind=_KIND_BY_GROUP[kind]))
        pos = end
    return tokens


_KIND_BY_GROUP = {
    "url": KIND_URL,
    "mention": KIND_MENTION,
    "hashtag": KIND_HASHTAG,
    "number": KIND_NUMBER,
    "word": KIND_WORD,
    "punct": KIND_PUNCT,
}
