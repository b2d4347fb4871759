from datetime import datetime, timezone
from random import Random
from zoneinfo import ZoneInfo

import pytest

from medioscope.analytics import (
    MediumProfile,
    TopicShares,
    audience_class,
    concentration,
    emissions_by_medium,
    load_media_roster,
    reference_figures_check,
    tendency_flags,
    top_k_share,
    topic_shares,
    volume_series,
)
from medioscope.classify import TOPIC_LABELS
from medioscope.config import PACKAGED_DATA
from medioscope.errors import DataError
from medioscope.synthetic import (
    gen_emission_datetimes,
    gen_media_emission_counts,
    gen_store_docs,
)


class TestVolume:
    def test_empty(self):
        series = volume_series([], granularity="day")
        assert series.buckets == []
        assert series.total == 0

    def test_reference_monthly_counts_reproduced(self):
        timestamps = gen_emission_datetimes()
        series = volume_series(timestamps, granularity="month")
        assert series.buckets == [
            ("2015-06", 120571),
            ("2015-07", 119704),
            ("2015-08", 124910),
            ("2015-09", 103739),
            ("2015-10", 123952),
            ("2015-11", 129042),
        ]
        assert series.total == 721918

    def test_local_midnight_edge(self):
        # 23:30 in Santiago on Oct 10 is 02:30 UTC on Oct 11
        local = datetime(2015, 10, 10, 23, 30, tzinfo=ZoneInfo("America/Santiago"))
        as_utc = local.astimezone(timezone.utc)
        assert as_utc.date().isoformat() == "2015-10-11"
        series = volume_series([as_utc], granularity="day")
        assert series.buckets == [("2015-10-10", 1)]

    def test_zero_filled_contiguous(self):
        stamps = [
            datetime(2015, 10, 1, 12, tzinfo=timezone.utc),
            datetime(2015, 10, 4, 12, tzinfo=timezone.utc),
        ]
        series = volume_series(stamps, granularity="day", timezone="UTC")
        assert [b for b, _ in series.buckets] == [
            "2015-10-01", "2015-10-02", "2015-10-03", "2015-10-04",
        ]
        assert [c for _, c in series.buckets] == [1, 0, 0, 1]

    def test_weights_count_emissions(self):
        docs = gen_store_docs(n=50, seed=2)
        series = volume_series(docs, granularity="month", weights=[d.emission_count for d in docs])
        assert series.total == sum(d.emission_count for d in docs)

    def test_conservation(self):
        docs = gen_store_docs(n=300, seed=4)
        assert volume_series(docs, granularity="day").total == 300

    def test_bad_granularity(self):
        with pytest.raises(DataError):
            volume_series([], granularity="week")


class TestAudience:
    def test_first_class_media_are_high(self):
        # the named top-class outlets all exceed two million followers
        roster = load_media_roster(
            (PACKAGED_DATA / "media_roster.ndjson").read_text(encoding="utf-8").splitlines()
        )
        assert len(roster) == 37
        by_handle = {p.handle: p for p in roster}
        for handle in ("24horas", "tvn", "tele13", "cnnchile", "biobio", "cooperativa"):
            assert by_handle[handle].follower_count > 2_000_000
            assert by_handle[handle].audience_class == "high"

    def test_boundaries_strict(self):
        assert audience_class(2_500_000) == "high"
        assert audience_class(2_000_000) == "medium"
        assert audience_class(500_001) == "medium"
        assert audience_class(500_000) == "low"
        assert audience_class(0) == "low"

    def test_negative_rejected(self):
        with pytest.raises(DataError):
            audience_class(-1)

    def test_monotone(self):
        order = {"low": 0, "medium": 1, "high": 2}
        previous = 0
        for count in (0, 1, 499_999, 500_000, 500_001, 1_999_999, 2_000_000, 2_000_001, 9_999_999):
            rank = order[audience_class(count)]
            assert rank >= previous
            previous = rank

    def test_profile_consistency_enforced(self):
        with pytest.raises(DataError):
            MediumProfile("x", "X", 100, "tv", audience_class="high")


class _Doc:
    def __init__(self, topic, medium="m1"):
        self.topic = topic
        self.medium_handle = medium
        self.doc_id = f"{medium}-{topic}"


class TestShares:
    def test_single_topic(self):
        shares = topic_shares([_Doc("deportes") for _ in range(10)])
        assert shares[0].shares["deportes"] == 1.0
        assert sum(shares[0].shares.values()) == pytest.approx(1.0, abs=1e-9)

    def test_combined_arithmetic(self):
        docs = [_Doc("deportes")] * 4 + [_Doc("entretenimiento")] * 4 + [_Doc("política")] * 2
        shares = topic_shares(docs)[0]
        combined = shares.shares["deportes"] + shares.shares["entretenimiento"]
        assert combined == pytest.approx(0.8, abs=1e-12)

    def test_random_assignment_matches_counting_oracle(self):
        rng = Random(6)
        docs = [_Doc(TOPIC_LABELS[rng.randrange(10)], f"m{rng.randrange(5)}") for _ in range(500)]
        shares = topic_shares(docs, group_by="medium")
        for group in shares:
            members = [d for d in docs if d.medium_handle == group.group]
            for label in TOPIC_LABELS:
                expected = sum(1 for d in members if d.topic == label) / len(members)
                assert group.shares[label] == pytest.approx(expected, abs=1e-12)
            assert sum(group.shares.values()) == pytest.approx(1.0, abs=1e-9)

    def test_untopiced_doc_rejected(self):
        with pytest.raises(DataError):
            topic_shares([_Doc(None)])


def make_shares(**values):
    shares = {label: 0.0 for label in TOPIC_LABELS}
    shares.update(values)
    total = sum(shares.values())
    if total:
        shares = {k: v / total for k, v in shares.items()}
    return TopicShares(group="ALL", shares=shares, doc_count=100)


class TestTendencies:
    def test_sports_entertainment_over_half(self):
        shares = make_shares(deportes=0.30, entretenimiento=0.25, política=0.45)
        assert tendency_flags(shares).sports_entertainment is True

    def test_exactly_half_is_false(self):
        shares = make_shares(deportes=0.25, entretenimiento=0.25, salud=0.50)
        assert tendency_flags(shares).sports_entertainment is False

    def test_judicial_over_ten_percent(self):
        shares = make_shares(judicial=0.12, deportes=0.88)
        assert tendency_flags(shares).judicial is True

    def test_economy_politics(self):
        shares = make_shares(economía=0.13, política=0.13, deportes=0.74)
        assert tendency_flags(shares).economy_politics is True

    def test_inclusive_variant_one_flag_away(self):
        shares = make_shares(deportes=0.25, entretenimiento=0.25, salud=0.50)
        assert tendency_flags(shares, strict=False).sports_entertainment is True

    def test_pure_function_recomputable(self):
        shares = make_shares(judicial=0.2, deportes=0.8)
        assert tendency_flags(shares) == tendency_flags(shares)


class TestConcentration:
    def test_basic(self):
        assert top_k_share({"a": 5, "b": 3, "c": 2}, 1) == 0.5

    def test_k_at_least_media_count(self):
        assert top_k_share({"a": 5, "b": 3}, 10) == 1.0

    def test_all_zero_absent(self):
        assert top_k_share({"a": 0, "b": 0}, 1) is None

    def test_seeded_68_percent(self):
        counts = gen_media_emission_counts()
        assert len(counts) == 37
        share = top_k_share(counts, 10)
        assert abs(share - 0.68) <= 0.001

    def test_monotone_in_k(self):
        rng = Random(7)
        counts = {f"m{i}": rng.randint(0, 100) for i in range(20)}
        previous = 0.0
        for k in range(1, 25):
            share = top_k_share(counts, k)
            assert share >= previous
            previous = share

    def test_tie_broken_by_handle(self):
        # b and c tie at the k-th place; b sorts first
        assert top_k_share({"a": 5, "c": 3, "b": 3}, 2) == pytest.approx(8 / 11)

    def test_emission_weighted_counts(self):
        docs = gen_store_docs(n=100, seed=9)
        counts = emissions_by_medium(docs)
        assert sum(counts.values()) == sum(d.emission_count for d in docs)
        summary = concentration(docs, 10)
        assert summary["total_emissions"] == sum(counts.values())


def test_reference_figures_flagged_inconsistent():
    check = reference_figures_check()
    assert check["recomputed_total"] == 721918
    assert check["recomputed_mean"] == 120319.67
    assert check["consistent"] is False
