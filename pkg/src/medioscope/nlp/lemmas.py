"""Rule-table lemmatizer for Spanish.

Rules live in data files, not code, so the tables can be extended without a
rebuild:

    rules:      pos<TAB>suffix<TAB>replacement<TAB>priority
    exceptions: pos<TAB>surface<TAB>lemma

A rule applies when its pos is a prefix of the token's tag (case-insensitive)
and its suffix matches. Application is deterministic: exceptions first, then
longest suffix wins, priority (ascending) breaks equal lengths. When nothing
fires the case-folded surface comes back unchanged. Matching is case-folded
but accent-preserving: "acusó" and "acuso" stay distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from ..errors import DataError


@dataclass
class LemmaRule:
    pos: str
    suffix: str
    replacement: str
    priority: int


def read_rules(lines: Iterable[str]) -> list[LemmaRule]:
    rules = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise DataError(f"rule table line {lineno}: expected 4 tab-separated fields")
        pos, suffix, replacement, priority = parts
        if not pos or not suffix:
            raise DataError(f"rule table line {lineno}: empty pos or suffix")
        try:
            rules.append(LemmaRule(pos, suffix, replacement, int(priority)))
        except ValueError as exc:
            raise DataError(f"rule table line {lineno}: bad priority {priority!r}") from exc
    return rules


def read_exceptions(lines: Iterable[str]) -> dict[tuple[str, str], str]:
    table: dict[tuple[str, str], str] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"exception table line {lineno}: expected 3 tab-separated fields")
        pos, surface, lemma = parts
        table[(pos.upper(), surface.casefold())] = lemma.casefold()
    return table


class Lemmatizer:
    def __init__(self, rules: list[LemmaRule], exceptions: dict[tuple[str, str], str]):
        # longest-suffix-first, then explicit priority, then table order
        self.rules = sorted(
            enumerate(rules),
            key=lambda pair: (-len(pair[1].suffix), pair[1].priority, pair[0]),
        )
        self.rules = [rule for _, rule in self.rules]
        self.exceptions = exceptions
        # most specific pos prefix first, deterministically
        self._exception_pos = sorted({pos for pos, _ in exceptions}, key=lambda p: (-len(p), p))

    def lemmatize(self, surface: str, pos: Optional[str]) -> str:
        word = surface.casefold()
        if pos is None:
            return word
        tag = pos.upper()
        for exc_pos in self._exception_pos:
            if tag.startswith(exc_pos) and (exc_pos, word) in self.exceptions:
                return self.exceptions[(exc_pos, word)]
        for rule in self.rules:
            if not tag.startswith(rule.pos.upper()):
                continue
            if word.endswith(rule.suffix) and len(word) > len(rule.suffix):
                return word[: -len(rule.suffix)] + rule.replacement
        return word

    def annotate(self, tokens) -> None:
        """Fill token.lemma for word tokens in place."""
        for token in tokens:
            if token.kind == "word":
                token.lemma = self.lemmatize(token.surface, token.pos)


def load_lemmatizer(rules_path: str | Path, exceptions_path: Optional[str | Path] = None) -> Lemmatizer:
    rules = read_rules(Path(rules_path).read_text(encoding="utf-8").splitlines())
    exceptions: dict[tuple[str, str], str] = {}
    if exceptions_path is not None:
        exceptions = read_exceptions(Path(exceptions_path).read_text(encoding="utf-8").splitlines())
    return Lemmatizer(rules, exceptions)


def default_lemmatizer() -> Lemmatizer:
    """Lemmatizer over the data files shipped with the package."""
    data = resources.files("medioscope").joinpath("data")
    rules = read_rules(data.joinpath("lemma_rules.tsv").read_text(encoding="utf-8").splitlines())
    exceptions = read_exceptions(
        data.joinpath("lemma_exceptions.tsv").read_text(encoding="utf-8").splitlines()
    )
    return Lemmatizer(rules, exceptions)
