"""Hidden Markov model POS tagger with Viterbi decoding.

The model keeps raw maximum-likelihood counts plus the additive smoothing
constant; probabilities are derived on access, which makes serialization
exact (integer counts round-trip perfectly through JSON).

Unknown words route through a suffix model estimated from hapax legomena:
their emission score combines the per-tag unknown mass with the tag
distribution of the word's longest known suffix (length <= 4).

Word matching is case-folded but accent-preserving.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import DataError, TrainingError
from .tokens import (
    KIND_HASHTAG,
    KIND_MENTION,
    KIND_NUMBER,
    KIND_PUNCT,
    KIND_URL,
    KIND_WORD,
    Token,
)

DEFAULT_ALPHA = 0.01
MAX_SUFFIX_LEN = 4
MODEL_FORMAT = "medioscope-hmm/1"

# Non-word tokens bypass the model entirely.
RESERVED_TAGS = {
    KIND_URL: "URL",
    KIND_MENTION: "MENTION",
    KIND_HASHTAG: "HASHTAG",
    KIND_NUMBER: "NUM",
    KIND_PUNCT: "PUNCT",
}

TaggedSentence = Sequence[tuple[str, str]]


@dataclass
class HmmModel:
    tagset: list[str]
    alpha: float
    sentence_count: int
    initial_counts: dict[str, int]
    transition_counts: dict[str, dict[str, int]]
    emission_counts: dict[str, dict[str, int]]
    suffix_counts: dict[str, dict[str, int]]
    vocabulary: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        if not self.vocabulary:
            for words in self.emission_counts.values():
                self.vocabulary.update(words)
        self._tag_total = {
            t: sum(self.emission_counts.get(t, {}).values()) for t in self.tagset
        }
        self._trans_total = {
            t: sum(self.transition_counts.get(t, {}).values()) for t in self.tagset
        }
        self._tag_prior_total = sum(self._tag_total.values())

    # ---- derived log-probabilities -------------------------------------

    def initial_logprob(self, tag: str) -> float:
        count = self.initial_counts.get(tag, 0)
        return math.log(
            (count + self.alpha) / (self.sentence_count + self.alpha * len(self.tagset))
        )

    def transition_logprob(self, prev: str, tag: str) -> float:
        count = self.transition_counts.get(prev, {}).get(tag, 0)
        total = self._trans_total.get(prev, 0)
        return math.log((count + self.alpha) / (total + self.alpha * len(self.tagset)))

    def emission_logprob(self, tag: str, word: str) -> float:
        word_cf = word.casefold()
        total = self._tag_total.get(tag, 0)
        denom = total + self.alpha * (len(self.vocabulary) + 1)
        if word_cf in self.vocabulary:
            count = self.emission_counts.get(tag, {}).get(word_cf, 0)
            return math.log((count + self.alpha) / denom)
        # unknown word: unknown mass reweighted by the suffix tag distribution
        score = math.log(self.alpha / denom)
        suffix = self._longest_suffix(word_cf)
        if suffix is not None:
            tag_counts = self.suffix_counts[suffix]
            suffix_total = sum(tag_counts.values())
            score += math.log(
                (tag_counts.get(tag, 0) + self.alpha)
                / (suffix_total + self.alpha * len(self.tagset))
            )
        return score

    def unknown_mass(self, tag: str) -> float:
        """P(unknown | tag) in probability space."""
        total = self._tag_total.get(tag, 0)
        return self.alpha / (total + self.alpha * (len(self.vocabulary) + 1))

    def emission_prob(self, tag: str, word: str) -> float:
        word_cf = word.casefold()
        if word_cf not in self.vocabulary:
            raise DataError(f"{word!r} not in model vocabulary")
        total = self._tag_total.get(tag, 0)
        denom = total + self.alpha * (len(self.vocabulary) + 1)
        return (self.emission_counts.get(tag, {}).get(word_cf, 0) + self.alpha) / denom

    def _longest_suffix(self, word_cf: str) -> str | None:
        for length in range(min(MAX_SUFFIX_LEN, len(word_cf)), 0, -1):
            suffix = word_cf[-length:]
            if suffix in self.suffix_counts:
                return suffix
        return None

    # ---- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "tagset": self.tagset,
            "alpha": self.alpha,
            "sentence_count": self.sentence_count,
            "initial_counts": self.initial_counts,
            "transition_counts": self.transition_counts,
            "emission_counts": self.emission_counts,
            "suffix_counts": self.suffix_counts,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HmmModel":
        if data.get("format") != MODEL_FORMAT:
            raise DataError(f"unsupported tagger model format: {data.get('format')!r}")
        return cls(
            tagset=list(data["tagset"]),
            alpha=float(data["alpha"]),
            sentence_count=int(data["sentence_count"]),
            initial_counts={k: int(v) for k, v in data["initial_counts"].items()},
            transition_counts={
                k: {k2: int(v2) for k2, v2 in v.items()}
                for k, v in data["transition_counts"].items()
            },
            emission_counts={
                k: {k2: int(v2) for k2, v2 in v.items()}
                for k, v in data["emission_counts"].items()
            },
            suffix_counts={
                k: {k2: int(v2) for k2, v2 in v.items()}
                for k, v in data["suffix_counts"].items()
            },
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "HmmModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def train_hmm(tagged_corpus: Iterable[TaggedSentence], alpha: float = DEFAULT_ALPHA) -> HmmModel:
    """Estimate counts from a tagged corpus.

    Suffix distributions come from hapax words only: words seen once are the
    best proxy for how unseen words behave.
    """
    sentences = [list(s) for s in tagged_corpus]
    if not sentences:
        raise TrainingError("cannot train tagger on an empty corpus")
    tagset: list[str] = []
    initial: dict[str, int] = {}
    transition: dict[str, dict[str, int]] = {}
    emission: dict[str, dict[str, int]] = {}
    word_freq: dict[str, int] = {}

    for sentence in sentences:
        if not sentence:
            raise TrainingError("corpus contains an empty sentence")
        prev = None
        for word, tag in sentence:
            if tag not in emission:
                tagset.append(tag)
                emission[tag] = {}
                transition[tag] = {}
            word_cf = word.casefold()
            emission[tag][word_cf] = emission[tag].get(word_cf, 0) + 1
            word_freq[word_cf] = word_freq.get(word_cf, 0) + 1
            if prev is None:
                initial[tag] = initial.get(tag, 0) + 1
            else:
                transition[prev][tag] = transition[prev].get(tag, 0) + 1
            prev = tag

    hapax = {w for w, c in word_freq.items() if c == 1}
    suffix_counts: dict[str, dict[str, int]] = {}
    for sentence in sentences:
        for word, tag in sentence:
            word_cf = word.casefold()
            if word_cf not in hapax:
                continue
            for length in range(1, min(MAX_SUFFIX_LEN, len(word_cf)) + 1):
                suffix = word_cf[-length:]
                by_tag = suffix_counts.setdefault(suffix, {})
                by_tag[tag] = by_tag.get(tag, 0) + 1

    return HmmModel(
        tagset=tagset,
        alpha=alpha,
        sentence_count=len(sentences),
        initial_counts=initial,
        transition_counts=transition,
        emission_counts=emission,
        suffix_counts=suffix_counts,
    )


def viterbi(model: HmmModel, words: Sequence[str]) -> tuple[list[str], float]:
    """Most probable tag path and its joint log-probability.

    Ties break toward the earliest tag in tagset order (strict > updates,
    scanning tags in order).
    """
    if not words:
        return [], 0.0
    tags = model.tagset
    n = len(words)
    score = [[0.0] * len(tags) for _ in range(n)]
    back = [[0] * len(tags) for _ in range(n)]
    for j, tag in enumerate(tags):
        score[0][j] = model.initial_logprob(tag) + model.emission_logprob(tag, words[0])
    for i in range(1, n):
        emit = [model.emission_logprob(tag, words[i]) for tag in tags]
        for j, tag in enumerate(tags):
            best_k = 0
            best_val = -math.inf
            for k, prev in enumerate(tags):
                val = score[i - 1][k] + model.transition_logprob(prev, tag)
                if val > best_val:
                    best_val = val
                    best_k = k
            score[i][j] = best_val + emit[j]
            back[i][j] = best_k

    last = 0
    best_val = -math.inf
    for j in range(len(tags)):
        if score[n - 1][j] > best_val:
            best_val = score[n - 1][j]
            last = j
    path = [last]
    for i in range(n - 1, 0, -1):
        path.append(back[i][path[-1]])
    path.reverse()
    return [tags[j] for j in path], best_val


def pos_tag(model: HmmModel, tokens: list[Token]) -> list[Token]:
    """Fill token.pos in place: Viterbi for words, reserved tags otherwise."""
    word_idx = [i for i, t in enumerate(tokens) if t.kind == KIND_WORD]
    for token in tokens:
        if token.kind != KIND_WORD:
            token.pos = RESERVED_TAGS[token.kind]
    if word_idx:
        tags, _ = viterbi(model, [tokens[i].surface for i in word_idx])
        for i, tag in zip(word_idx, tags):
            tokens[i].pos = tag
    return tokens


def read_tagged_corpus(lines: Iterable[str]) -> list[list[tuple[str, str]]]:
    """Parse the tagged-corpus format: "word<TAB>TAG", blank line = sentence break."""
    sentences: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            if current:
                sentences.append(current)
                current = []
            continue
        if line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise DataError(f"tagged corpus line {lineno}: expected 'word<TAB>TAG', got {line!r}")
        current.append((parts[0], parts[1]))
    if current:
        sentences.append(current)
    return sentences
