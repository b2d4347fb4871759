from collections import Counter
from datetime import date, timedelta
from random import Random

import pytest

from medioscope.errors import QueryError, StoreError
from medioscope.store import DocFilter, DocStore, match_filter
from medioscope.synthetic import gen_store_docs


def linear_scan(docs, doc_filter):
    """Independent oracle: apply the filter semantics doc by doc."""
    matched = []
    for doc in docs:
        ok = True
        if doc_filter.media is not None and doc.medium_handle not in doc_filter.media:
            ok = False
        if ok and doc_filter.topics is not None and doc.topic not in doc_filter.topics:
            ok = False
        if ok and (doc_filter.date_start or doc_filter.date_end):
            day = doc.published_at.date()
            if doc_filter.date_start and day < doc_filter.date_start:
                ok = False
            if doc_filter.date_end and day >= doc_filter.date_end:
                ok = False
        if ok and doc_filter.text_terms:
            lemmas = set(doc.lemmas) | set(doc.keywords)
            if any(t not in lemmas for t in doc_filter.text_terms):
                ok = False
        if ok and doc_filter.geoname_id is not None:
            if all(m["geoname_id"] != doc_filter.geoname_id for m in doc.geo_mentions):
                ok = False
        if ok:
            matched.append(doc)
    return matched


def random_filter(rng, docs):
    media = sorted({d.medium_handle for d in docs})
    topics = sorted({d.topic for d in docs})
    lemmas = sorted({l for d in docs[:300] for l in d.lemmas})
    geonames = sorted({m["geoname_id"] for d in docs[:300] for m in d.geo_mentions})
    doc_filter = DocFilter()
    if rng.random() < 0.4:
        doc_filter.media = rng.sample(media, rng.randint(1, 3))
    if rng.random() < 0.4:
        doc_filter.topics = rng.sample(topics, rng.randint(1, 3))
    if rng.random() < 0.4:
        start = date(2015, 6, 1) + timedelta(days=rng.randrange(150))
        doc_filter.date_start = start
        doc_filter.date_end = start + timedelta(days=rng.randint(1, 60))
    if rng.random() < 0.3 and lemmas:
        doc_filter.text_terms = [rng.choice(lemmas)]
    if rng.random() < 0.2 and geonames:
        doc_filter.geoname_id = rng.choice(geonames)
    return doc_filter


@pytest.fixture(scope="module")
def corpus():
    return gen_store_docs(n=2_000, seed=41)


@pytest.fixture(scope="module")
def loaded_store(corpus, tmp_path_factory):
    store = DocStore(tmp_path_factory.mktemp("store"))
    for doc in sorted(corpus, key=lambda d: d.doc_id):
        store.index_doc(doc)
    yield store
    store.close()


class TestIndexing:
    def test_read_your_write(self, tmp_path):
        docs = gen_store_docs(n=3, seed=1)
        with DocStore(tmp_path / "s") as store:
            assert store.index_doc(docs[0]) == "created"
            assert store.get(docs[0].doc_id).to_dict() == docs[0].to_dict()

    def test_identical_resubmission_noop(self, tmp_path):
        docs = gen_store_docs(n=2, seed=2)
        with DocStore(tmp_path / "s") as store:
            store.index_doc(docs[0])
            size = (tmp_path / "s" / "store.log").stat().st_size
            assert store.index_doc(docs[0]) == "unchanged"
            assert (tmp_path / "s" / "store.log").stat().st_size == size
            assert len(store) == 1

    def test_conflicting_overwrite_versioned_audited(self, tmp_path):
        docs = gen_store_docs(n=1, seed=3)
        with DocStore(tmp_path / "s") as store:
            store.index_doc(docs[0])
            changed = gen_store_docs(n=1, seed=3)[0]
            changed.topic = "salud" if changed.topic != "salud" else "deportes"
            assert store.index_doc(changed) == "updated"
            assert len(store) == 1
            assert store.audit_log == [
                {"doc_id": docs[0].doc_id, "version": 2, "event": "overwrite"}
            ]
            assert store.get(docs[0].doc_id).topic == changed.topic

    def test_planted_unique_lemmas_retrievable(self, tmp_path):
        docs = gen_store_docs(n=1_000, seed=5)
        for i, doc in enumerate(docs):
            doc.lemmas = doc.lemmas + [f"unico{i}"]
        with DocStore(tmp_path / "s") as store:
            for doc in docs:
                store.index_doc(doc)
            for i, doc in enumerate(docs):
                result = store.query(DocFilter(text_terms=[f"unico{i}"]), limit=5)
                assert result.total == 1
                assert result.docs[0].doc_id == doc.doc_id


class TestQuery:
    def test_empty_store(self, tmp_path):
        with DocStore(tmp_path / "s") as store:
            assert store.query(DocFilter(), limit=10).total == 0

    def test_topic_filter_exact(self, loaded_store, corpus):
        result = loaded_store.query(DocFilter(topics=["deportes"]), limit=5_000)
        expected = {d.doc_id for d in corpus if d.topic == "deportes"}
        assert {d.doc_id for d in result.docs} == expected
        assert result.total == len(expected)

    def test_random_filters_match_linear_scan(self, loaded_store, corpus):
        rng = Random(77)
        for _ in range(150):
            doc_filter = random_filter(rng, corpus)
            result = loaded_store.query(doc_filter, limit=len(corpus) + 1)
            oracle = linear_scan(corpus, doc_filter)
            assert {d.doc_id for d in result.docs} == {d.doc_id for d in oracle}
            assert result.total == len(oracle)

    def test_sort_date_desc_then_id(self, loaded_store):
        result = loaded_store.query(DocFilter(), limit=500)
        keys = [(-d.published_at.timestamp(), d.doc_id) for d in result.docs]
        assert keys == sorted(keys)

    def test_pagination_complete_no_dupes(self, loaded_store):
        full = loaded_store.query(DocFilter(), limit=5_000)
        pages = []
        for offset in range(0, full.total, 97):
            pages.extend(loaded_store.query(DocFilter(), offset=offset, limit=97).docs)
        assert [d.doc_id for d in pages] == [d.doc_id for d in full.docs]
        assert len({d.doc_id for d in pages}) == full.total

    def test_bad_ranges_rejected(self, loaded_store):
        with pytest.raises(QueryError):
            loaded_store.query(
                DocFilter(date_start=date(2015, 10, 1), date_end=date(2015, 10, 1)), limit=5
            )
        with pytest.raises(QueryError):
            loaded_store.query(DocFilter(), limit=0)


class TestFacets:
    def test_topic_facet(self, tmp_path):
        docs = gen_store_docs(n=10, seed=7)
        for i, doc in enumerate(docs):
            doc.topic = "deportes" if i < 7 else "salud"
        with DocStore(tmp_path / "s") as store:
            for doc in docs:
                store.index_doc(doc)
            counts = store.facet_counts(DocFilter(), "topic").counts
            assert counts == {"deportes": 7, "salud": 3}

    def test_empty_match_empty_counts(self, loaded_store):
        counts = loaded_store.facet_counts(DocFilter(media=["nadie"]), "medium").counts
        assert counts == {}

    def test_random_facets_match_oracle(self, loaded_store, corpus):
        rng = Random(78)
        for _ in range(40):
            doc_filter = random_filter(rng, corpus)
            facet = rng.choice(["medium", "topic", "locality", "day"])
            got = loaded_store.facet_counts(doc_filter, facet).counts
            oracle_docs = linear_scan(corpus, doc_filter)
            expected = Counter()
            for doc in oracle_docs:
                if facet == "medium":
                    expected[doc.medium_handle] += 1
                elif facet == "topic":
                    if doc.topic:
                        expected[doc.topic] += 1
                elif facet == "day":
                    expected[doc.published_at.date().isoformat()] += 1
                else:
                    for gid in {m["geoname_id"] for m in doc.geo_mentions}:
                        expected[gid] += 1
            assert dict(got) == dict(expected)

    def test_unknown_facet_rejected(self, loaded_store):
        with pytest.raises(QueryError):
            loaded_store.facet_counts(DocFilter(), "color")


class TestDurability:
    def test_close_reopen_preserves_everything(self, tmp_path):
        docs = gen_store_docs(n=200, seed=9)
        store = DocStore(tmp_path / "s")
        for doc in sorted(docs, key=lambda d: d.doc_id):
            store.index_doc(doc)
        before = [d.to_dict() for d in store.all_docs()]
        log_before = (tmp_path / "s" / "store.log").read_bytes()
        store.close()

        reopened = DocStore(tmp_path / "s")
        after = [d.to_dict() for d in reopened.all_docs()]
        assert after == before
        assert (tmp_path / "s" / "store.log").read_bytes() == log_before
        result = reopened.query(DocFilter(topics=["salud"]), limit=500)
        assert result.total == sum(1 for d in docs if d.topic == "salud")
        reopened.close()

    def test_corruption_detected(self, tmp_path):
        docs = gen_store_docs(n=5, seed=10)
        store = DocStore(tmp_path / "s")
        for doc in docs:
            store.index_doc(doc)
        store.close()
        log = tmp_path / "s" / "store.log"
        raw = bytearray(log.read_bytes())
        raw[20] ^= 0xFF  # flip a payload byte
        log.write_bytes(bytes(raw))
        with pytest.raises(StoreError):
            DocStore(tmp_path / "s")

    def test_version_checked(self, tmp_path):
        DocStore(tmp_path / "s").close()
        (tmp_path / "s" / "VERSION").write_text("other/99\n")
        with pytest.raises(StoreError):
            DocStore(tmp_path / "s")


def test_match_filter_agrees_with_oracle(corpus):
    rng = Random(80)
    for _ in range(60):
        doc_filter = random_filter(rng, corpus)
        expected = {d.doc_id for d in linear_scan(corpus, doc_filter)}
        got = {d.doc_id for d in corpus if match_filter(doc_filter, d)}
        assert got == expected
