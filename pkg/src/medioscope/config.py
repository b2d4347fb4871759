"""Pipeline configuration: a flat key = value file with CLI-flag overrides.

Lines are "key = value"; blank lines and # comments are ignored. Unknown keys
are rejected so typos fail loudly. Paths that are not set fall back to the
data files shipped with the package where a default makes sense.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .errors import ConfigError

PACKAGED_DATA = Path(__file__).parent / "data"

FETCHER_MODES = ("live", "stub", "offline")


@dataclass
class PipelineConfig:
    # inputs
    tweet_stream: Optional[str] = None
    gazetteer: Optional[str] = None
    tagged_corpus: str = str(PACKAGED_DATA / "tagged_corpus_es.tsv")
    labeled_corpus: Optional[str] = None
    lemma_rules: str = str(PACKAGED_DATA / "lemma_rules.tsv")
    lemma_exceptions: str = str(PACKAGED_DATA / "lemma_exceptions.tsv")
    frequency_list: str = str(PACKAGED_DATA / "frequency_es.tsv")
    media_roster: str = str(PACKAGED_DATA / "media_roster.ndjson")
    store_dir: str = "store"
    # pretrained models (optional; trained from corpora when absent)
    hmm_model: Optional[str] = None
    classifier_model: Optional[str] = None
    # hyperparameters
    svm_c: float = 1.0
    svm_epochs: int = 200
    hmm_alpha: float = 0.01
    keyword_k: int = 5
    commonness_cutoff: int = 500
    max_ngram: int = 3
    min_density: float = 0.5
    # environment
    timezone: str = "America/Santiago"
    country_hint: str = "CL"
    fetcher_mode: str = "offline"
    fixture_pages: Optional[str] = None
    fetch_timeout: float = 10.0
    # service
    host: str = "127.0.0.1"
    port: int = 8300
    cors_origin: str = "*"

    def validate(self, require_stream: bool = False) -> None:
        if self.fetcher_mode not in FETCHER_MODES:
            raise ConfigError(f"fetcher_mode must be one of {FETCHER_MODES}")
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port {self.port} outside [1, 65535]")
        if require_stream and self.tweet_stream is None:
            raise ConfigError("tweet_stream is required")
        for name in (
            "tweet_stream",
            "gazetteer",
            "tagged_corpus",
            "labeled_corpus",
            "lemma_rules",
            "lemma_exceptions",
            "frequency_list",
            "media_roster",
            "hmm_model",
            "classifier_model",
            "fixture_pages",
        ):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{name} path does not exist: {value}")
        if self.fetcher_mode == "stub" and self.fixture_pages is None:
            raise ConfigError("fetcher_mode=stub requires fixture_pages")


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}
_INT_KEYS = {"svm_epochs", "keyword_k", "commonness_cutoff", "max_ngram", "port"}
_FLOAT_KEYS = {"svm_c", "hmm_alpha", "min_density", "fetch_timeout"}


def parse_config(lines, source: str = "<config>") -> PipelineConfig:
    values: dict = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value, source, lineno)
    return PipelineConfig(**values)


def _coerce(key: str, value: str, source: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"{source}:{lineno}: bad value for {key}: {value!r}") from exc
    if value.lower() in ("none", ""):
        return None
    return value


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> PipelineConfig:
    if path is not None:
        config_path = Path(path)
        if not config_path.exists():
            raise ConfigError(f"config file not found: {path}")
        config = parse_config(config_path.read_text(encoding="utf-8").splitlines(), source=str(path))
    else:
        config = PipelineConfig()
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config override {key!r}")
        setattr(config, key, value)
    return config
