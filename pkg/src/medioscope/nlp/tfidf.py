"""TF-IDF vectors, general-language frequency list, keyword extraction.

Weighting is raw term frequency times natural-log inverse document frequency:
weight(t, d) = tf(t, d) * ln(N / df(t)). Terms present in every document get
weight 0 and are dropped, so stored entries are always strictly positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ..errors import DataError

DEFAULT_COMMONNESS_CUTOFF = 500


@dataclass
class DocumentVector:
    doc_id: str
    entries: dict[str, float]  # lemma -> weight, no zero entries
    norm: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.norm == 0.0 and self.entries:
            self.norm = math.sqrt(sum(w * w for w in self.entries.values()))


@dataclass
class VectorizerStats:
    """Document frequencies of a reference corpus, reusable on new documents."""

    df: dict[str, int]
    n_docs: int

    def vectorize(self, doc_id: str, lemmas: Sequence[str]) -> DocumentVector:
        tf: dict[str, int] = {}
        for lemma in lemmas:
            tf[lemma] = tf.get(lemma, 0) + 1
        entries: dict[str, float] = {}
        for lemma, count in tf.items():
            df = self.df.get(lemma)
            if df is None or df >= self.n_docs:
                continue
            entries[lemma] = count * math.log(self.n_docs / df)
        return DocumentVector(doc_id=doc_id, entries=entries)

    def to_dict(self) -> dict:
        return {"df": self.df, "n_docs": self.n_docs}

    @classmethod
    def from_dict(cls, data: dict) -> "VectorizerStats":
        return cls(df={k: int(v) for k, v in data["df"].items()}, n_docs=int(data["n_docs"]))


def document_frequencies(docs: Sequence[tuple[str, Sequence[str]]]) -> VectorizerStats:
    df: dict[str, int] = {}
    for _, lemmas in docs:
        for lemma in set(lemmas):
            df[lemma] = df.get(lemma, 0) + 1
    return VectorizerStats(df=df, n_docs=len(docs))


def compute_tfidf(docs: Sequence[tuple[str, Sequence[str]]]) -> list[DocumentVector]:
    """Vectorize a corpus of (doc_id, lemmas) pairs against itself."""
    if not docs:
        raise DataError("cannot compute tf-idf over an empty corpus")
    stats = document_frequencies(docs)
    return [stats.vectorize(doc_id, lemmas) for doc_id, lemmas in docs]


class FrequencyList:
    """General-language word frequencies; rank 1 is the most common word."""

    def __init__(self, words: list[tuple[str, int]]):
        prev = None
        self._rank: dict[str, int] = {}
        self._count: dict[str, int] = {}
        for position, (word, count) in enumerate(words, start=1):
            if count <= 0:
                raise DataError(f"frequency list: non-positive count for {word!r}")
            if prev is not None and count > prev:
                raise DataError("frequency list must be sorted by descending count")
            prev = count
            key = word.casefold()
            if key not in self._rank:
                self._rank[key] = position
                self._count[key] = count

    @classmethod
    def from_tsv(cls, lines: Iterable[str]) -> "FrequencyList":
        words: list[tuple[str, int]] = []
        for lineno, line in enumerate(lines, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"frequency list line {lineno}: expected 'word<TAB>count'")
            try:
                words.append((parts[0], int(parts[1])))
            except ValueError as exc:
                raise DataError(f"frequency list line {lineno}: bad count {parts[1]!r}") from exc
        return cls(words)

    def rank(self, word: str) -> Optional[int]:
        return self._rank.get(word.casefold())

    def count(self, word: str) -> Optional[int]:
        return self._count.get(word.casefold())

    def is_common(self, word: str, cutoff: int = DEFAULT_COMMONNESS_CUTOFF) -> bool:
        rank = self.rank(word)
        return rank is not None and rank <= cutoff

    def __len__(self) -> int:
        return len(self._rank)


def extract_keywords(
    lemmas: Sequence[str],
    stats: VectorizerStats,
    freq_list: FrequencyList,
    k: int,
    commonness_cutoff: int = DEFAULT_COMMONNESS_CUTOFF,
) -> list[str]:
    """Top-k lemmas by tf-idf, skipping common-language words.

    Lemmas ranking inside the top-`commonness_cutoff` of the general-language
    list never qualify; remaining candidates are ordered by weight descending,
    ties broken lexicographically. Fewer than k candidates is not an error.
    """
    if k < 1:
        raise DataError("k must be >= 1")
    vector = stats.vectorize("", lemmas)
    candidates = [
        (lemma, weight)
        for lemma, weight in vector.entries.items()
        if not freq_list.is_common(lemma, commonness_cutoff)
    ]
    candidates.sort(key=lambda pair: (-pair[1], pair[0]))
    return [lemma for lemma, _ in candidates[:k]]
