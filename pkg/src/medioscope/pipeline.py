"""End-to-end pipeline: ingest -> scrape -> nlp -> classify -> geotag -> index.

Every stage is deterministic for a fixed configuration and input, so two runs
over the same fixture produce byte-identical stores and persisted summaries.
Wall-clock timings stay out of the persisted summary for that reason; they
are printed, not stored.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional
from zoneinfo import ZoneInfo

from . import classify as classifier_mod, geo, scrape
from .config import PipelineConfig
from .errors import ConfigError, DataError
from .ingest import FETCH_OK, NewsDoc, dedupe_news, parse_tweet_stream
from .jsonutil import dump_json
from .nlp.hmm import HmmModel, pos_tag, read_tagged_corpus, train_hmm
from .nlp.lemmas import Lemmatizer, load_lemmatizer
from .nlp.tfidf import FrequencyList, document_frequencies, extract_keywords
from .nlp.tokens import KIND_WORD, tokenize
from .store import DocStore

SUMMARY_NAME = "run_summary.json"


class TextAnalyzer:
    """Shared tokenizer + tagger + lemmatizer chain.

    The same chain lemmatizes documents at index time and terms at query
    time, keeping full-text matching lemma-exact.
    """

    def __init__(self, tagger: HmmModel, lemmatizer: Lemmatizer):
        self.tagger = tagger
        self.lemmatizer = lemmatizer

    def tagged_tokens(self, text: str):
        tokens = tokenize(text)
        pos_tag(self.tagger, tokens)
        self.lemmatizer.annotate(tokens)
        return tokens

    def lemmas(self, text: str) -> list[str]:
        return [t.lemma for t in self.tagged_tokens(text) if t.kind == KIND_WORD and t.lemma]


@dataclass
class StageSummary:
    name: str
    docs_in: int
    docs_out: int
    warnings: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, include_timing: bool = False) -> dict:
        data = {
            "name": self.name,
            "docs_in": self.docs_in,
            "docs_out": self.docs_out,
            "warnings": self.warnings,
            "extra": self.extra,
        }
        if include_timing:
            data["seconds"] = round(self.seconds, 3)
        return data


@dataclass
class RunSummary:
    stages: list[StageSummary]

    def stage(self, name: str) -> StageSummary:
        for stage in self.stages:
            if stage.name == name:
                return stage
        raise KeyError(name)

    def to_persistable(self) -> dict:
        # no wall-clock data: the persisted summary must be run-stable
        return {"stages": [s.to_dict(include_timing=False) for s in self.stages]}

    def format_lines(self) -> list[str]:
        lines = []
        for stage in self.stages:
            extras = " ".join(f"{k}={v}" for k, v in sorted(stage.extra.items()))
            line = f"{stage.name:<10} in={stage.docs_in:<7} out={stage.docs_out:<7} {extras}".rstrip()
            if stage.warnings:
                line += f"  [{len(stage.warnings)} warning(s)]"
            lines.append(line + f"  ({stage.seconds:.2f}s)")
        return lines


def _roster_handles(config: PipelineConfig) -> Optional[set[str]]:
    if not config.media_roster or not Path(config.media_roster).exists():
        return None
    handles = set()
    for line in Path(config.media_roster).read_text(encoding="utf-8").splitlines():
        if line.strip():
            handles.add(json.loads(line)["handle"])
    return handles


def build_analyzer(config: PipelineConfig) -> TextAnalyzer:
    if config.hmm_model:
        tagger = HmmModel.load(config.hmm_model)
    else:
        sentences = read_tagged_corpus(
            Path(config.tagged_corpus).read_text(encoding="utf-8").splitlines()
        )
        tagger = train_hmm(sentences, alpha=config.hmm_alpha)
    lemmatizer = load_lemmatizer(config.lemma_rules, config.lemma_exceptions)
    return TextAnalyzer(tagger, lemmatizer)


def build_fetcher(config: PipelineConfig) -> scrape.Fetcher:
    if config.fetcher_mode == "live":
        return scrape.LiveFetcher(timeout=config.fetch_timeout)
    if config.fetcher_mode == "stub":
        pages: dict[str, scrape.FetchResult] = {}
        for line in Path(config.fixture_pages).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            pages[obj["url"]] = scrape.FetchResult(
                status=int(obj.get("status", 200)),
                body=obj["html"].encode("utf-8"),
            )
        return scrape.StubFetcher(pages)

    class _OfflineFetcher:
        def fetch(self, url: str) -> scrape.FetchResult:
            raise scrape.FetchTransportError("offline mode")

    return _OfflineFetcher()


def load_classifier(config: PipelineConfig, analyzer: TextAnalyzer) -> Optional[classifier_mod.ClassifierModel]:
    if config.classifier_model:
        return classifier_mod.ClassifierModel.load(config.classifier_model)
    if config.labeled_corpus:
        labeled = read_labeled_corpus(Path(config.labeled_corpus), analyzer)
        return train_labeled(labeled, config)
    return None


def read_labeled_corpus(path: Path, analyzer: TextAnalyzer) -> list[tuple[str, list[str], str]]:
    """NDJSON {"id", "text", "label"} -> (id, lemmas, label) triples."""
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            label = obj["label"]
            if label not in classifier_mod.TOPIC_LABELS:
                raise DataError(f"{path}:{lineno}: unknown label {label!r}")
            rows.append((str(obj["id"]), analyzer.lemmas(obj["text"]), label))
        except (json.JSONDecodeError, KeyError) as exc:
            raise DataError(f"{path}:{lineno}: bad labeled record: {exc}") from exc
    return rows


def train_labeled(
    rows: list[tuple[str, list[str], str]], config: PipelineConfig
) -> classifier_mod.ClassifierModel:
    stats = document_frequencies([(doc_id, lemmas) for doc_id, lemmas, _ in rows])
    labeled = [
        (stats.vectorize(doc_id, lemmas), label) for doc_id, lemmas, label in rows
    ]
    params = classifier_mod.SvmParams(c=config.svm_c, epochs=config.svm_epochs)
    return classifier_mod.train_svm(labeled, params=params, vectorizer=stats)


def classify_text_of(doc: NewsDoc) -> tuple[str, str]:
    """Text a document is classified from, plus its provenance tag."""
    if doc.fetch_status == FETCH_OK and doc.body:
        title = doc.title or ""
        return (f"{title}\n\n{doc.body}" if title else doc.body), "article"
    return doc.tweet_text, "tweet"


def run_pipeline(
    config: PipelineConfig,
    fetcher: Optional[scrape.Fetcher] = None,
) -> RunSummary:
    config.validate(require_stream=True)
    stages: list[StageSummary] = []

    # ingest: parse + per-month dedup
    started = time.perf_counter()
    with open(config.tweet_stream, "r", encoding="utf-8") as stream:
        parsed = parse_tweet_stream(stream)
    ingest_warnings = list(parsed.warnings)
    known_handles = _roster_handles(config)
    if known_handles is not None:
        unknown = sorted({r.medium_handle for r in parsed.records} - known_handles)
        if unknown:
            ingest_warnings.append(f"unknown medium handles: {', '.join(unknown)}")
    zone = ZoneInfo(config.timezone)
    by_month: dict[str, list] = {}
    for record in parsed.records:
        local = record.published_at.astimezone(zone)
        by_month.setdefault(f"{local.year:04d}-{local.month:02d}", []).append(record)
    docs: list[NewsDoc] = []
    duplicates = 0
    for month in sorted(by_month):
        result = dedupe_news(by_month[month], month, tz=config.timezone)
        docs.extend(result.docs)
        duplicates += result.duplicate_count
    for doc in docs:
        doc.country_hint = config.country_hint
    stages.append(
        StageSummary(
            name="ingest",
            docs_in=len(parsed.records),
            docs_out=len(docs),
            warnings=ingest_warnings,
            extra={"duplicates": duplicates, "months": len(by_month)},
            seconds=time.perf_counter() - started,
        )
    )

    # scrape
    started = time.perf_counter()
    fetcher = fetcher or build_fetcher(config)
    status_counts: dict[str, int] = {}
    for doc in docs:
        scrape.resolve_and_scrape(doc, fetcher, min_density=config.min_density)
        status_counts[doc.fetch_status] = status_counts.get(doc.fetch_status, 0) + 1
    stages.append(
        StageSummary(
            name="scrape",
            docs_in=len(docs),
            docs_out=len(docs),
            extra=status_counts,
            seconds=time.perf_counter() - started,
        )
    )

    # nlp: lemmas for search + keyword extraction
    started = time.perf_counter()
    analyzer = build_analyzer(config)
    freq_list = FrequencyList.from_tsv(
        Path(config.frequency_list).read_text(encoding="utf-8").splitlines()
    )
    classify_lemmas: dict[str, list[str]] = {}
    for doc in docs:
        text, source = classify_text_of(doc)
        doc.classify_source = source
        lemmas = analyzer.lemmas(text)
        classify_lemmas[doc.doc_id] = lemmas
        searchable = list(lemmas)
        if source == "article":
            searchable.extend(analyzer.lemmas(doc.tweet_text))
        seen: set[str] = set()
        doc.lemmas = [l for l in searchable if not (l in seen or seen.add(l))]
    batch_stats = document_frequencies(
        [(doc.doc_id, classify_lemmas[doc.doc_id]) for doc in docs]
    )
    for doc in docs:
        doc.keywords = extract_keywords(
            classify_lemmas[doc.doc_id],
            batch_stats,
            freq_list,
            k=config.keyword_k,
            commonness_cutoff=config.commonness_cutoff,
        )
    stages.append(
        StageSummary(
            name="nlp",
            docs_in=len(docs),
            docs_out=len(docs),
            extra={"vocabulary": len(batch_stats.df)},
            seconds=time.perf_counter() - started,
        )
    )

    # classify
    started = time.perf_counter()
    model = load_classifier(config, analyzer)
    classified = 0
    if model is not None:
        vectorizer = model.vectorizer
        if vectorizer is None:
            raise ConfigError("classifier model lacks vectorizer statistics")
        for doc in docs:
            vector = vectorizer.vectorize(doc.doc_id, classify_lemmas[doc.doc_id])
            doc.topic = classifier_mod.classify(model, vector).label
            classified += 1
    stages.append(
        StageSummary(
            name="classify",
            docs_in=len(docs),
            docs_out=classified,
            extra={} if model is not None else {"skipped": "no classifier model/corpus"},
            seconds=time.perf_counter() - started,
        )
    )

    # geotag
    started = time.perf_counter()
    geotagged = 0
    mention_count = 0
    if config.gazetteer:
        with open(config.gazetteer, "r", encoding="utf-8") as fh:
            index = geo.load_gazetteer(fh)
        for doc in docs:
            text, _ = classify_text_of(doc)
            tokens = analyzer.tagged_tokens(text)
            candidates = geo.match_toponyms(tokens, index, max_ngram=config.max_ngram)
            mentions = geo.disambiguate(candidates, doc.country_hint)
            doc.geo_mentions = [m.to_dict() for m in mentions]
            mention_count += len(mentions)
            geotagged += 1
    stages.append(
        StageSummary(
            name="geotag",
            docs_in=len(docs),
            docs_out=geotagged,
            extra={"mentions": mention_count} if config.gazetteer else {"skipped": "no gazetteer"},
            seconds=time.perf_counter() - started,
        )
    )

    # index: doc_id order fixes the log layout regardless of fetch order
    started = time.perf_counter()
    outcomes = {"created": 0, "unchanged": 0, "updated": 0}
    with DocStore(config.store_dir) as store:
        for doc in sorted(docs, key=lambda d: d.doc_id):
            outcomes[store.index_doc(doc)] += 1
    stages.append(
        StageSummary(
            name="index",
            docs_in=len(docs),
            docs_out=outcomes["created"] + outcomes["updated"],
            extra=outcomes,
            seconds=time.perf_counter() - started,
        )
    )

    summary = RunSummary(stages=stages)
    summary_path = Path(config.store_dir) / SUMMARY_NAME
    summary_path.write_bytes(dump_json(summary.to_persistable()))
    return summary
