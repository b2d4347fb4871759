"""Tweet-stream parsing, URL canonicalization and per-month news deduplication.

Input is a line-delimited NDJSON stream, one tweet per line:
    {"tweet_id": str, "medium": str, "created_at": RFC3339 str, "text": str, "urls": [str]}

Repeated emissions of one news item collapse into a single NewsDoc keyed by
canonical URL (or by normalized tweet text when the tweet carries no usable
link). Dedup scope is one calendar month.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Iterable, Iterator, Optional
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit
from zoneinfo import ZoneInfo

from .errors import CanonicalizationError, DataError, InputError

FETCH_OK = "ok"
FETCH_BROKEN_LINK = "broken_link"
FETCH_NO_LINK = "no_link"
FETCH_ERROR = "fetch_error"
FETCH_STATUSES = (FETCH_OK, FETCH_BROKEN_LINK, FETCH_NO_LINK, FETCH_ERROR)

# Query parameters that never identify content.
TRACKING_PARAMS = {"fbclid", "gclid"}
TRACKING_PREFIXES = ("utm_",)
DEFAULT_PORTS = {"http": 80, "https": 443}


@dataclass
class TweetRecord:
    """One emission: a single tweet published by a medium's account."""

    tweet_id: str
    medium_handle: str
    published_at: datetime
    text: str
    urls: list[str] = field(default_factory=list)


@dataclass
class NewsDoc:
    """A deduplicated news item with its derived annotations."""

    doc_id: str
    medium_handle: str
    published_at: datetime
    tweet_text: str
    canonical_url: Optional[str] = None
    title: Optional[str] = None
    body: Optional[str] = None
    fetch_status: Optional[str] = None  # one of FETCH_STATUSES once resolved
    topic: Optional[str] = None
    keywords: list[str] = field(default_factory=list)
    lemmas: list[str] = field(default_factory=list)
    geo_mentions: list[dict] = field(default_factory=list)
    country_hint: str = "CL"
    emission_count: int = 1
    extra_urls: list[str] = field(default_factory=list)
    classify_source: Optional[str] = None  # "article" or "tweet"

    def to_dict(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "medium_handle": self.medium_handle,
            "published_at": self.published_at.astimezone(timezone.utc).isoformat(),
            "tweet_text": self.tweet_text,
            "canonical_url": self.canonical_url,
            "title": self.title,
            "body": self.body,
            "fetch_status": self.fetch_status,
            "topic": self.topic,
            "keywords": list(self.keywords),
            "lemmas": list(self.lemmas),
            "geo_mentions": [dict(m) for m in self.geo_mentions],
            "country_hint": self.country_hint,
            "emission_count": self.emission_count,
            "extra_urls": list(self.extra_urls),
            "classify_source": self.classify_source,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NewsDoc":
        return cls(
            doc_id=data["doc_id"],
            medium_handle=data["medium_handle"],
            published_at=parse_timestamp(data["published_at"]),
            tweet_text=data["tweet_text"],
            canonical_url=data.get("canonical_url"),
            title=data.get("title"),
            body=data.get("body"),
            fetch_status=data.get("fetch_status"),
            topic=data.get("topic"),
            keywords=list(data.get("keywords", [])),
            lemmas=list(data.get("lemmas", [])),
            geo_mentions=[dict(m) for m in data.get("geo_mentions", [])],
            country_hint=data.get("country_hint", "CL"),
            emission_count=int(data.get("emission_count", 1)),
            extra_urls=list(data.get("extra_urls", [])),
            classify_source=data.get("classify_source"),
        )


@dataclass
class ParseResult:
    records: list[TweetRecord]
    warnings: list[str]

    @property
    def invalid_count(self) -> int:
        return len(self.warnings)


@dataclass
class DedupeResult:
    docs: list[NewsDoc]
    total_emissions: int
    duplicate_count: int


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC3339 timestamp; naive values are taken as UTC."""
    raw = value.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_tweet_stream(source: Iterable[str]) -> ParseResult:
    """Parse NDJSON lines into TweetRecords, order preserved.

    Malformed lines produce a warning carrying the 1-based line number and are
    skipped; they are never fatal. An unreadable source is fatal (InputError).
    """
    records: list[TweetRecord] = []
    warnings: list[str] = []
    seen_ids: set[str] = set()
    try:
        line_iter: Iterator[tuple[int, str]] = enumerate(source, start=1)
        for lineno, line in line_iter:
            line = line.strip()
            if not line:
                continue
            try:
                records.append(_parse_line(line, seen_ids))
            except _LineError as exc:
                warnings.append(f"line {lineno}: {exc}")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"unreadable tweet stream: {exc}") from exc
    return ParseResult(records=records, warnings=warnings)


class _LineError(ValueError):
    pass


def _parse_line(line: str, seen_ids: set[str]) -> TweetRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise _LineError(f"invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise _LineError("record is not an object")
    tweet_id = obj.get("tweet_id")
    if not isinstance(tweet_id, str) or not tweet_id:
        raise _LineError("missing or empty tweet_id")
    if tweet_id in seen_ids:
        raise _LineError(f"duplicate tweet_id {tweet_id!r}")
    medium = obj.get("medium")
    if not isinstance(medium, str) or not medium:
        raise _LineError("missing or empty medium")
    created = obj.get("created_at")
    if not isinstance(created, str):
        raise _LineError("missing created_at")
    try:
        published_at = parse_timestamp(created)
    except ValueError as exc:
        raise _LineError(f"unparseable created_at {created!r}") from exc
    text = obj.get("text")
    if not isinstance(text, str):
        raise _LineError("missing text")
    urls = obj.get("urls", [])
    if urls is None:
        urls = []
    if not isinstance(urls, list) or any(not isinstance(u, str) for u in urls):
        raise _LineError("urls must be a list of strings")
    seen_ids.add(tweet_id)
    return TweetRecord(
        tweet_id=tweet_id,
        medium_handle=medium,
        published_at=published_at,
        text=text,
        urls=list(urls),
    )


def canonicalize_url(url: str) -> str:
    """Reduce a URL to its canonical, idempotent form.

    Lowercases scheme and host, drops default ports, fragments and tracking
    query parameters (utm_*, fbclid, gclid), and trims trailing slashes.
    """
    try:
        parts = urlsplit(url.strip())
        port = parts.port  # raises ValueError on a malformed port
    except ValueError as exc:
        raise CanonicalizationError(f"unparseable URL {url!r}: {exc}") from exc
    scheme = parts.scheme.lower()
    host = (parts.hostname or "").lower()
    if not scheme or not host:
        raise CanonicalizationError(f"not an absolute URL: {url!r}")

    netloc = host
    if parts.username:
        cred = parts.username + (f":{parts.password}" if parts.password else "")
        netloc = f"{cred}@{netloc}"
    if port is not None and port != DEFAULT_PORTS.get(scheme):
        netloc = f"{netloc}:{port}"

    path = parts.path or "/"
    if len(path) > 1:
        path = path.rstrip("/") or "/"

    pairs = [
        (k, v)
        for k, v in parse_qsl(parts.query, keep_blank_values=True)
        if not _is_tracking_param(k)
    ]
    query = urlencode(pairs)
    return urlunsplit((scheme, netloc, path, query, ""))


def _is_tracking_param(key: str) -> bool:
    low = key.lower()
    return low in TRACKING_PARAMS or low.startswith(TRACKING_PREFIXES)


_WS = re.compile(r"\s+")


def normalized_text_key(text: str) -> str:
    """Dedup fallback key: case-folded, whitespace-collapsed tweet text."""
    return _WS.sub(" ", text.strip()).casefold()


def doc_id_for(month: str, kind: str, key: str) -> str:
    digest = hashlib.sha256(f"{month}|{kind}|{key}".encode("utf-8")).hexdigest()
    return digest[:24]


def dedupe_news(
    records: list[TweetRecord],
    month: str,
    tz: str = "UTC",
) -> DedupeResult:
    """Collapse emissions into one NewsDoc per distinct canonical key.

    `month` is "YYYY-MM"; every record must fall in that month under `tz`.
    The representative emission is the earliest one; later duplicates only
    bump emission_count. Tweets without a parseable URL fall back to the
    normalized-tweet-text key.
    """
    zone = ZoneInfo(tz)
    by_key: dict[str, NewsDoc] = {}
    duplicates = 0
    for rec in records:
        local = rec.published_at.astimezone(zone)
        rec_month = f"{local.year:04d}-{local.month:02d}"
        if rec_month != month:
            raise DataError(
                f"tweet {rec.tweet_id} dated {rec_month} outside dedup month {month}"
            )
        canonical: Optional[str] = None
        status: Optional[str] = None
        if rec.urls:
            try:
                canonical = canonicalize_url(rec.urls[0])
            except CanonicalizationError:
                canonical = None
                status = FETCH_BROKEN_LINK
        else:
            status = FETCH_NO_LINK
        if canonical is not None:
            kind, key = "url", canonical
        else:
            kind, key = "text", normalized_text_key(rec.text)

        doc_id = doc_id_for(month, kind, key)
        existing = by_key.get(doc_id)
        if existing is None:
            by_key[doc_id] = NewsDoc(
                doc_id=doc_id,
                medium_handle=rec.medium_handle,
                published_at=rec.published_at,
                tweet_text=rec.text,
                canonical_url=canonical,
                fetch_status=status,
                extra_urls=list(rec.urls[1:]),
            )
        else:
            duplicates += 1
            existing.emission_count += 1
            if rec.published_at < existing.published_at:
                existing.published_at = rec.published_at
                existing.medium_handle = rec.medium_handle
                existing.tweet_text = rec.text
    return DedupeResult(
        docs=list(by_key.values()),
        total_emissions=len(records),
        duplicate_count=duplicates,
    )
