"""Editorial and audience indicators.

Volume series bucket by local time (America/Santiago by default: daily news
cycles are a local-time phenomenon even though storage is UTC). Audience
classes follow the strict follower thresholds: high above 2,000,000, medium
above 500,000, low otherwise. Tendency thresholds are strict as well and
configurable for an inclusive variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Iterable, Optional, Sequence
from zoneinfo import ZoneInfo

from .errors import DataError
from .classify import TOPIC_LABELS

DEFAULT_TIMEZONE = "America/Santiago"

AUDIENCE_HIGH_THRESHOLD = 2_000_000
AUDIENCE_MEDIUM_THRESHOLD = 500_000

SPORTS_ENTERTAINMENT_THRESHOLD = 0.50
ECONOMY_POLITICS_THRESHOLD = 0.25
JUDICIAL_THRESHOLD = 0.10

# Reference monthly emission counts used to seed reproduction fixtures,
# June through November 2015.
REFERENCE_MONTHLY_EMISSIONS = {
    "2015-06": 120571,
    "2015-07": 119704,
    "2015-08": 124910,
    "2015-09": 103739,
    "2015-10": 123952,
    "2015-11": 129042,
}
# Published summary figures that do not add up against the monthly list.
REFERENCE_STATED_TOTAL = 736538
REFERENCE_STATED_MEAN = 120259.6


def reference_figures_check() -> dict:
    """Recompute totals from the monthly reference list and flag mismatches."""
    total = sum(REFERENCE_MONTHLY_EMISSIONS.values())
    mean = total / len(REFERENCE_MONTHLY_EMISSIONS)
    return {
        "monthly": dict(REFERENCE_MONTHLY_EMISSIONS),
        "recomputed_total": total,
        "recomputed_mean": round(mean, 2),
        "stated_total": REFERENCE_STATED_TOTAL,
        "stated_mean": REFERENCE_STATED_MEAN,
        "consistent": total == REFERENCE_STATED_TOTAL
        and round(mean, 1) == REFERENCE_STATED_MEAN,
    }


def audience_class(follower_count: int) -> str:
    if follower_count < 0:
        raise DataError("follower count must be non-negative")
    if follower_count > AUDIENCE_HIGH_THRESHOLD:
        return "high"
    if follower_count > AUDIENCE_MEDIUM_THRESHOLD:
        return "medium"
    return "low"


@dataclass
class MediumProfile:
    handle: str
    display_name: str
    follower_count: int
    medium_kind: str  # tv | radio | print | digital_native
    audience_class: str = ""

    def __post_init__(self) -> None:
        derived = audience_class(self.follower_count)
        if self.audience_class and self.audience_class != derived:
            raise DataError(
                f"{self.handle}: audience_class {self.audience_class!r} "
                f"inconsistent with {self.follower_count} followers"
            )
        self.audience_class = derived

    def to_dict(self) -> dict:
        return {
            "handle": self.handle,
            "name": self.display_name,
            "followers": self.follower_count,
            "kind": self.medium_kind,
            "audience_class": self.audience_class,
        }


def load_media_roster(lines: Iterable[str]) -> list[MediumProfile]:
    """NDJSON roster: {"handle": str, "name": str, "followers": int, "kind": str}."""
    profiles = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            profiles.append(
                MediumProfile(
                    handle=obj["handle"],
                    display_name=obj.get("name", obj["handle"]),
                    follower_count=int(obj["followers"]),
                    medium_kind=obj.get("kind", "digital_native"),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DataError(f"media roster line {lineno}: {exc}") from exc
    return profiles


@dataclass
class VolumeSeries:
    granularity: str  # "day" | "month"
    timezone: str
    buckets: list[tuple[str, int]]  # contiguous, zero-filled

    @property
    def total(self) -> int:
        return sum(count for _, count in self.buckets)

    def to_dict(self) -> dict:
        return {
            "granularity": self.granularity,
            "timezone": self.timezone,
            "buckets": [{"bucket": b, "count": c} for b, c in self.buckets],
            "total": self.total,
        }


def _timestamp_of(item) -> datetime:
    if isinstance(item, datetime):
        return item
    ts = getattr(item, "published_at", None)
    if ts is None:
        raise DataError(f"cannot extract timestamp from {item!r}")
    return ts


def volume_series(
    docs: Iterable,
    granularity: str = "day",
    timezone: str = DEFAULT_TIMEZONE,
    weights: Optional[Iterable[int]] = None,
) -> VolumeSeries:
    """Bucket timestamped items by local time, zero-filling interior gaps.

    `docs` may be datetimes or anything with a published_at attribute.
    Optional weights count each item as several emissions.
    """
    if granularity not in ("day", "month"):
        raise DataError(f"unknown granularity {granularity!r}")
    zone = ZoneInfo(timezone)
    counts: dict[str, int] = {}
    items = list(docs)
    weight_list = list(weights) if weights is not None else [1] * len(items)
    if len(weight_list) != len(items):
        raise DataError("weights must align one-to-one with docs")
    for item, weight in zip(items, weight_list):
        local = _timestamp_of(item).astimezone(zone)
        if granularity == "day":
            key = local.date().isoformat()
        else:
            key = f"{local.year:04d}-{local.month:02d}"
        counts[key] = counts.get(key, 0) + weight
    if not counts:
        return VolumeSeries(granularity=granularity, timezone=timezone, buckets=[])
    buckets = [(key, counts.get(key, 0)) for key in _bucket_range(min(counts), max(counts), granularity)]
    return VolumeSeries(granularity=granularity, timezone=timezone, buckets=buckets)


def _bucket_range(first: str, last: str, granularity: str) -> list[str]:
    keys = []
    if granularity == "day":
        cursor = date.fromisoformat(first)
        end = date.fromisoformat(last)
        while cursor <= end:
            keys.append(cursor.isoformat())
            cursor += timedelta(days=1)
    else:
        year, month = (int(p) for p in first.split("-"))
        end_year, end_month = (int(p) for p in last.split("-"))
        while (year, month) <= (end_year, end_month):
            keys.append(f"{year:04d}-{month:02d}")
            month += 1
            if month > 12:
                month = 1
                year += 1
    return keys


@dataclass
class TopicShares:
    group: str  # medium handle or "ALL"
    shares: dict[str, float]  # every topic label, zero-filled
    doc_count: int

    def to_dict(self) -> dict:
        return {"group": self.group, "shares": self.shares, "doc_count": self.doc_count}


def topic_shares(docs: Sequence, group_by: str = "ALL") -> list[TopicShares]:
    """Per-topic shares per medium (or one ALL group); shares sum to 1."""
    if group_by not in ("ALL", "medium"):
        raise DataError(f"unknown group_by {group_by!r}")
    groups: dict[str, dict[str, int]] = {}
    for doc in docs:
        topic = getattr(doc, "topic", None)
        if topic is None:
            raise DataError(f"document {getattr(doc, 'doc_id', doc)!r} has no topic")
        if topic not in TOPIC_LABELS:
            raise DataError(f"unknown topic {topic!r}")
        key = "ALL" if group_by == "ALL" else doc.medium_handle
        groups.setdefault(key, {})
        groups[key][topic] = groups[key].get(topic, 0) + 1
    result = []
    for key in sorted(groups):
        counts = groups[key]
        total = sum(counts.values())
        shares = {label: counts.get(label, 0) / total for label in TOPIC_LABELS}
        result.append(TopicShares(group=key, shares=shares, doc_count=total))
    return result


@dataclass
class TendencyFlags:
    sports_entertainment: bool
    economy_politics: bool
    judicial: bool

    def to_dict(self) -> dict:
        return {
            "sports_entertainment": self.sports_entertainment,
            "economy_politics": self.economy_politics,
            "judicial": self.judicial,
        }


def tendency_flags(
    shares: TopicShares,
    sports_entertainment_threshold: float = SPORTS_ENTERTAINMENT_THRESHOLD,
    economy_politics_threshold: float = ECONOMY_POLITICS_THRESHOLD,
    judicial_threshold: float = JUDICIAL_THRESHOLD,
    strict: bool = True,
) -> TendencyFlags:
    """Editorial tendency flags; thresholds strict (>) by default."""

    def over(value: float, threshold: float) -> bool:
        return value > threshold if strict else value >= threshold

    s = shares.shares
    return TendencyFlags(
        sports_entertainment=over(s["deportes"] + s["entretenimiento"], sports_entertainment_threshold),
        economy_politics=over(s["economía"] + s["política"], economy_politics_threshold),
        judicial=over(s["judicial"], judicial_threshold),
    )


def top_k_share(per_medium_counts: dict[str, int], k: int) -> Optional[float]:
    """Fraction of total emissions produced by the k most prolific media."""
    if k < 1:
        raise DataError("k must be >= 1")
    for handle, count in per_medium_counts.items():
        if count < 0:
            raise DataError(f"negative count for {handle!r}")
    total = sum(per_medium_counts.values())
    if total == 0:
        return None
    ranked = sorted(per_medium_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return sum(count for _, count in ranked[:k]) / total


def emissions_by_medium(docs: Iterable) -> dict[str, int]:
    """Total emission counts per medium (duplicates included, per NewsDoc)."""
    counts: dict[str, int] = {}
    for doc in docs:
        weight = getattr(doc, "emission_count", 1)
        counts[doc.medium_handle] = counts.get(doc.medium_handle, 0) + weight
    return dict(sorted(counts.items()))


def concentration(docs: Sequence, k: int) -> dict:
    """Production-concentration summary: share of emissions held by top-k media."""
    counts = emissions_by_medium(docs)
    return {
        "k": k,
        "share": top_k_share(counts, k) if counts else None,
        "total_emissions": sum(counts.values()),
        "media": len(counts),
        "per_medium": counts,
    }


def tendency_report(docs: Sequence) -> list[dict]:
    """Per-medium topic shares with their editorial tendency flags."""
    report = []
    for shares in topic_shares(docs, group_by="medium"):
        entry = shares.to_dict()
        entry["flags"] = tendency_flags(shares).to_dict()
        report.append(entry)
    return report
