import json
from datetime import datetime, timezone
from random import Random

import pytest
from hypothesis import given, strategies as st

from medioscope.errors import CanonicalizationError, DataError
from medioscope.ingest import (
    FETCH_STATUSES,
    TweetRecord,
    canonicalize_url,
    dedupe_news,
    normalized_text_key,
    parse_tweet_stream,
)
from medioscope.synthetic import gen_tweet_records, records_to_ndjson


def make_line(i, url=None, created="2015-10-01T12:00:00Z"):
    return json.dumps(
        {
            "tweet_id": f"t{i}",
            "medium": "emol",
            "created_at": created,
            "text": f"texto {i}",
            "urls": [url] if url else [],
        }
    )


class TestParseTweetStream:
    def test_empty_stream(self):
        assert parse_tweet_stream([]).records == []

    def test_partial_failure(self):
        lines = [make_line(1), make_line(2), "{broken", make_line(3)]
        result = parse_tweet_stream(lines)
        assert len(result.records) == 3
        assert len(result.warnings) == 1
        assert "line 3" in result.warnings[0]

    def test_order_preserved_at_scale(self):
        records = gen_tweet_records(10_000, 10_000, seed=2)
        parsed = parse_tweet_stream(records_to_ndjson(records).splitlines())
        assert len(parsed.records) == 10_000
        assert parsed.warnings == []
        assert [r.tweet_id for r in parsed.records] == [r.tweet_id for r in records]

    def test_duplicate_tweet_id_warned(self):
        lines = [make_line(1), make_line(1)]
        result = parse_tweet_stream(lines)
        assert len(result.records) == 1
        assert "duplicate" in result.warnings[0]

    def test_bad_timestamp_warned(self):
        result = parse_tweet_stream([make_line(1, created="not a date")])
        assert result.records == []
        assert "created_at" in result.warnings[0]

    def test_unreadable_source_fatal(self):
        from medioscope.errors import InputError

        def broken():
            yield make_line(1)
            raise OSError("disk gone")

        with pytest.raises(InputError):
            parse_tweet_stream(broken())


class TestCanonicalizeUrl:
    def test_rule_by_rule(self):
        assert (
            canonicalize_url("HTTP://Example.com:80/a/?utm_source=tw#x")
            == "http://example.com/a"
        )

    def test_already_canonical_unchanged(self):
        url = "https://example.com/a/b?x=1"
        assert canonicalize_url(url) == url

    def test_unparseable_raises(self):
        with pytest.raises(CanonicalizationError):
            canonicalize_url("not a url")
        with pytest.raises(CanonicalizationError):
            canonicalize_url("https://bad:port:99999x/")

    def test_perturbed_variants_collapse(self):
        # oracle: the perturbation generator only applies transformations
        # canonicalization is documented to undo
        rng = Random(9)
        bases = [f"https://site{i}.example.cl/seccion/nota-{i}?id={i}" for i in range(50)]
        variants = []
        for i in range(500):
            base = bases[i % 50]
            scheme, rest = base.split("://", 1)
            host, path = rest.split("/", 1)
            if rng.random() < 0.5:
                scheme = scheme.upper()
            if rng.random() < 0.5:
                host = host.upper()
            if rng.random() < 0.3:
                host += ":443"
            url = f"{scheme}://{host}/{path}"
            if rng.random() < 0.5:
                url += "&utm_source=tw&utm_medium=social"
            if rng.random() < 0.3:
                url += "&fbclid=abc123"
            if rng.random() < 0.4:
                url += "#fragmento"
            variants.append(url)
        canon = {canonicalize_url(v) for v in variants}
        assert canon == {canonicalize_url(b) for b in bases}
        assert len(canon) == 50

    @given(st.sampled_from(["http", "https"]), st.integers(0, 3), st.booleans())
    def test_idempotent(self, scheme, depth, slash):
        url = f"{scheme}://Example.CL" + "/seg" * depth + ("/" if slash else "")
        once = canonicalize_url(url)
        assert canonicalize_url(once) == once


class TestDedupe:
    def records(self, urls):
        return [
            TweetRecord(
                tweet_id=f"t{i}",
                medium_handle="emol",
                published_at=datetime(2015, 10, 1 + i, 12, 0, tzinfo=timezone.utc),
                text=f"texto {i}",
                urls=[u] if u else [],
            )
            for i, u in enumerate(urls)
        ]

    def test_shared_url_collapses(self):
        records = self.records(
            ["https://ex.cl/a", "https://ex.cl/a?utm_source=x", "https://ex.cl/b"]
        )
        result = dedupe_news(records, "2015-10")
        assert len(result.docs) == 2
        assert result.duplicate_count == 1

    def test_empty(self):
        assert dedupe_news([], "2015-10").docs == []

    def test_reference_month_scale(self):
        # generator is the oracle: exactly 65,572 distinct URLs by construction
        records = gen_tweet_records(123_952, 65_572, month="2015-10", seed=4)
        result = dedupe_news(records, "2015-10", tz="America/Santiago")
        assert len(result.docs) == 65_572
        assert result.total_emissions == 123_952

    def test_no_url_keys_on_text(self):
        records = self.records([None, None])
        records[1].text = records[0].text.upper() + "  "
        result = dedupe_news(records, "2015-10")
        assert len(result.docs) == 1  # case/whitespace-folded text key
        assert result.docs[0].fetch_status == "no_link"

    def test_out_of_month_rejected(self):
        records = self.records(["https://ex.cl/a"])
        with pytest.raises(DataError):
            dedupe_news(records, "2015-11")

    def test_earliest_emission_wins(self):
        records = self.records(["https://ex.cl/a", "https://ex.cl/a"])
        records[1].published_at = datetime(2015, 10, 1, 1, 0, tzinfo=timezone.utc)
        result = dedupe_news(records, "2015-10")
        assert result.docs[0].published_at == records[1].published_at

    def test_size_bound_and_equality_iff_distinct(self):
        distinct = self.records([f"https://ex.cl/{i}" for i in range(5)])
        assert len(dedupe_news(distinct, "2015-10").docs) == len(distinct)
        repeated = self.records(["https://ex.cl/a"] * 5)
        assert len(dedupe_news(repeated, "2015-10").docs) < len(repeated)


class TestInvariants:
    def test_reingestion_identical(self):
        records = gen_tweet_records(300, 200, seed=6)
        first = dedupe_news(records, "2015-10", tz="America/Santiago")
        second = dedupe_news(records, "2015-10", tz="America/Santiago")
        assert [d.to_dict() for d in first.docs] == [d.to_dict() for d in second.docs]

    def test_fetch_status_partition(self):
        assert len(set(FETCH_STATUSES)) == 4

    @given(st.text(max_size=40))
    def test_text_key_stable(self, text):
        assert normalized_text_key(text) == normalized_text_key(f"  {text}  ")
