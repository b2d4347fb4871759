import json
from pathlib import Path

import pytest

from medioscope.config import PACKAGED_DATA, PipelineConfig
from medioscope.nlp.hmm import read_tagged_corpus, train_hmm
from medioscope.nlp.lemmas import default_lemmatizer
from medioscope.pipeline import TextAnalyzer
from medioscope.synthetic import gen_demo_fixture

DATA = PACKAGED_DATA


@pytest.fixture(scope="session")
def default_tagger():
    sentences = read_tagged_corpus(
        (DATA / "tagged_corpus_es.tsv").read_text(encoding="utf-8").splitlines()
    )
    return train_hmm(sentences)


@pytest.fixture(scope="session")
def analyzer(default_tagger):
    return TextAnalyzer(default_tagger, default_lemmatizer())


@pytest.fixture(scope="session")
def gazetteer_lines():
    return (DATA / "gazetteer_fixture.tsv").read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    """Demo fixture (tweets + stub pages + labeled corpus), generated once."""
    root = tmp_path_factory.mktemp("demo")
    gen_demo_fixture(root)
    return root


@pytest.fixture()
def demo_config(demo_dir, tmp_path):
    return PipelineConfig(
        tweet_stream=str(demo_dir / "tweets.ndjson"),
        labeled_corpus=str(demo_dir / "labeled.ndjson"),
        gazetteer=str(DATA / "gazetteer_fixture.tsv"),
        store_dir=str(tmp_path / "store"),
        fetcher_mode="stub",
        fixture_pages=str(demo_dir / "pages.ndjson"),
    )


def read_ndjson(path: Path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
