"""Persistent news-document store with filtered queries and facet counts.

Layout (versioned):

    <store_dir>/VERSION      one line, "medioscope-store/1"
    <store_dir>/store.log    append-only record log

Each log record is framed as

    [4-byte big-endian payload length][payload][4-byte big-endian CRC32]

where the payload is canonical JSON: {"op": "put", "version": n, "doc": {...}}.
The in-memory inverted index (medium, topic, day, locality, lemma postings)
is rebuilt deterministically on open; corruption is detected per record by
the checksum. Re-indexing an identical document appends nothing; a doc_id
resubmitted with different content appends a higher version and leaves an
audit trail.

Single writer, many readers: a lock serializes writes, readers see a
consistent snapshot no older than the last acknowledged write.
"""

from __future__ import annotations

import struct
import threading
import zlib
from dataclasses import dataclass, field
from datetime import date, timezone
from pathlib import Path
from typing import Optional

from .errors import QueryError, StoreError
from .ingest import NewsDoc
from .jsonutil import dump_json, load_json

STORE_VERSION = "medioscope-store/1"
LOG_NAME = "store.log"
FACET_FIELDS = ("medium", "topic", "locality", "day")

_HEADER = struct.Struct(">I")


@dataclass
class DocFilter:
    """Conjunctive constraints; an empty filter matches everything."""

    media: Optional[list[str]] = None
    topics: Optional[list[str]] = None
    date_start: Optional[date] = None  # inclusive, UTC calendar date
    date_end: Optional[date] = None  # exclusive
    text_terms: Optional[list[str]] = None  # exact lemma match, all required
    geoname_id: Optional[int] = None

    def validate(self) -> None:
        if (
            self.date_start is not None
            and self.date_end is not None
            and self.date_start >= self.date_end
        ):
            raise QueryError(
                f"empty date range: start {self.date_start} must precede end {self.date_end}"
            )


@dataclass
class FacetCount:
    field: str
    counts: dict

    def to_dict(self) -> dict:
        return {"field": self.field, "counts": self.counts}


@dataclass
class QueryResult:
    docs: list[NewsDoc]
    total: int
    offset: int
    limit: int


@dataclass
class _Indexed:
    doc: NewsDoc
    version: int
    payload: bytes  # canonical serialized doc, for cheap equality
    day: str
    lemmas: frozenset
    localities: frozenset
    sort_key: tuple = field(default=())

    @classmethod
    def build(cls, doc: NewsDoc, version: int) -> "_Indexed":
        payload = dump_json(doc.to_dict())
        ts = doc.published_at.astimezone(timezone.utc)
        return cls(
            doc=doc,
            version=version,
            payload=payload,
            day=ts.date().isoformat(),
            lemmas=frozenset(doc.lemmas) | frozenset(doc.keywords),
            localities=frozenset(int(m["geoname_id"]) for m in doc.geo_mentions),
            sort_key=(-ts.timestamp(), doc.doc_id),
        )


class DocStore:
    def __init__(self, store_dir: str | Path, create: bool = True):
        self.path = Path(store_dir)
        self.log_path = self.path / LOG_NAME
        self._lock = threading.RLock()
        self._docs: dict[str, _Indexed] = {}
        self._by_medium: dict[str, set[str]] = {}
        self._by_topic: dict[str, set[str]] = {}
        self._by_day: dict[str, set[str]] = {}
        self._by_locality: dict[int, set[str]] = {}
        self._by_lemma: dict[str, set[str]] = {}
        self.audit_log: list[dict] = []

        version_file = self.path / "VERSION"
        if not self.path.exists():
            if not create:
                raise StoreError(f"store directory {self.path} does not exist")
            self.path.mkdir(parents=True)
        if version_file.exists():
            found = version_file.read_text().strip()
            if found != STORE_VERSION:
                raise StoreError(f"unsupported store version {found!r}")
        else:
            version_file.write_text(STORE_VERSION + "\n")
        self._replay()
        self._log = open(self.log_path, "ab")

    # ---- log plumbing ----------------------------------------------------

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        raw = self.log_path.read_bytes()
        offset = 0
        while offset < len(raw):
            if offset + _HEADER.size > len(raw):
                raise StoreError(f"truncated record header at byte {offset}")
            (length,) = _HEADER.unpack_from(raw, offset)
            end = offset + _HEADER.size + length + 4
            if end > len(raw):
                raise StoreError(f"truncated record at byte {offset}")
            payload = raw[offset + _HEADER.size : offset + _HEADER.size + length]
            (crc,) = _HEADER.unpack_from(raw, offset + _HEADER.size + length)
            if zlib.crc32(payload) != crc:
                raise StoreError(f"checksum mismatch at byte {offset}")
            record = load_json(payload)
            if record.get("op") != "put":
                raise StoreError(f"unknown record op {record.get('op')!r}")
            self._apply(NewsDoc.from_dict(record["doc"]), int(record["version"]))
            offset = end

    def _append(self, doc_dict: dict, version: int) -> None:
        payload = dump_json({"op": "put", "version": version, "doc": doc_dict})
        self._log.write(_HEADER.pack(len(payload)) + payload + _HEADER.pack(zlib.crc32(payload)))
        self._log.flush()

    def _apply(self, doc: NewsDoc, version: int) -> None:
        previous = self._docs.get(doc.doc_id)
        if previous is not None:
            self._unindex(previous)
            self.audit_log.append(
                {"doc_id": doc.doc_id, "version": version, "event": "overwrite"}
            )
        entry = _Indexed.build(doc, version)
        self._docs[doc.doc_id] = entry
        self._by_medium.setdefault(doc.medium_handle, set()).add(doc.doc_id)
        if doc.topic is not None:
            self._by_topic.setdefault(doc.topic, set()).add(doc.doc_id)
        self._by_day.setdefault(entry.day, set()).add(doc.doc_id)
        for gid in entry.localities:
            self._by_locality.setdefault(gid, set()).add(doc.doc_id)
        for lemma in entry.lemmas:
            self._by_lemma.setdefault(lemma, set()).add(doc.doc_id)

    def _unindex(self, entry: _Indexed) -> None:
        doc_id = entry.doc.doc_id
        self._by_medium.get(entry.doc.medium_handle, set()).discard(doc_id)
        if entry.doc.topic is not None:
            self._by_topic.get(entry.doc.topic, set()).discard(doc_id)
        self._by_day.get(entry.day, set()).discard(doc_id)
        for gid in entry.localities:
            self._by_locality.get(gid, set()).discard(doc_id)
        for lemma in entry.lemmas:
            self._by_lemma.get(lemma, set()).discard(doc_id)

    # ---- public API ------------------------------------------------------

    def index_doc(self, doc: NewsDoc) -> str:
        """Returns "created", "unchanged" or "updated". Unchanged is a no-op."""
        with self._lock:
            payload = dump_json(doc.to_dict())
            existing = self._docs.get(doc.doc_id)
            if existing is not None and existing.payload == payload:
                return "unchanged"
            version = 1 if existing is None else existing.version + 1
            self._apply(NewsDoc.from_dict(load_json(payload)), version)
            self._append(load_json(payload), version)
            return "created" if version == 1 else "updated"

    def get(self, doc_id: str) -> Optional[NewsDoc]:
        with self._lock:
            entry = self._docs.get(doc_id)
            return entry.doc if entry else None

    def __len__(self) -> int:
        with self._lock:
            return len(self._docs)

    def _candidate_ids(self, doc_filter: DocFilter) -> set[str]:
        ids: Optional[set[str]] = None

        def narrow(subset: set[str]) -> set[str]:
            return subset if ids is None else ids & subset

        if doc_filter.media is not None:
            ids = narrow(set().union(*(self._by_medium.get(m, set()) for m in doc_filter.media)) if doc_filter.media else set())
        if doc_filter.topics is not None:
            ids = narrow(set().union(*(self._by_topic.get(t, set()) for t in doc_filter.topics)) if doc_filter.topics else set())
        if doc_filter.geoname_id is not None:
            ids = narrow(self._by_locality.get(doc_filter.geoname_id, set()))
        if doc_filter.text_terms:
            for term in doc_filter.text_terms:
                ids = narrow(self._by_lemma.get(term, set()))
        if ids is None:
            ids = set(self._docs)
        if doc_filter.date_start is not None or doc_filter.date_end is not None:
            start = doc_filter.date_start.isoformat() if doc_filter.date_start else ""
            end = doc_filter.date_end.isoformat() if doc_filter.date_end else "9999-99-99"
            ids = {i for i in ids if start <= self._docs[i].day < end}
        return ids

    def query(self, doc_filter: DocFilter, offset: int = 0, limit: int = 50) -> QueryResult:
        """Filtered page sorted by date descending then doc_id; exact total."""
        if limit < 1:
            raise QueryError("limit must be >= 1")
        if offset < 0:
            raise QueryError("offset must be >= 0")
        doc_filter.validate()
        with self._lock:
            ids = self._candidate_ids(doc_filter)
            ordered = sorted(ids, key=lambda i: self._docs[i].sort_key)
            page = ordered[offset : offset + limit]
            return QueryResult(
                docs=[self._docs[i].doc for i in page],
                total=len(ordered),
                offset=offset,
                limit=limit,
            )

    def facet_counts(self, doc_filter: DocFilter, facet: str) -> FacetCount:
        """Exact value counts for one facet field over the filtered subset."""
        if facet not in FACET_FIELDS:
            raise QueryError(f"unknown facet field {facet!r}; expected one of {FACET_FIELDS}")
        doc_filter.validate()
        with self._lock:
            ids = self._candidate_ids(doc_filter)
            counts: dict = {}
            for doc_id in ids:
                entry = self._docs[doc_id]
                if facet == "medium":
                    values = [entry.doc.medium_handle]
                elif facet == "topic":
                    values = [entry.doc.topic] if entry.doc.topic is not None else []
                elif facet == "day":
                    values = [entry.day]
                else:  # locality: counted once per doc per locality
                    values = sorted(entry.localities)
                for value in values:
                    counts[value] = counts.get(value, 0) + 1
            if facet == "locality":
                counts = {int(k): v for k, v in counts.items()}
            return FacetCount(field=facet, counts=dict(sorted(counts.items(), key=lambda kv: str(kv[0]))))

    def all_docs(self) -> list[NewsDoc]:
        with self._lock:
            return [self._docs[i].doc for i in sorted(self._docs)]

    def stats(self) -> dict:
        with self._lock:
            return {
                "docs": len(self._docs),
                "version": STORE_VERSION,
                "overwrites": len(self.audit_log),
                "path": str(self.path),
            }

    def close(self) -> None:
        with self._lock:
            self._log.close()

    def __enter__(self) -> "DocStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def match_filter(doc_filter: DocFilter, doc: NewsDoc) -> bool:
    """Reference predicate equivalent to the indexed query path."""
    if doc_filter.media is not None and doc.medium_handle not in doc_filter.media:
        return False
    if doc_filter.topics is not None and (doc.topic is None or doc.topic not in doc_filter.topics):
        return False
    day = doc.published_at.astimezone(timezone.utc).date()
    if doc_filter.date_start is not None and day < doc_filter.date_start:
        return False
    if doc_filter.date_end is not None and day >= doc_filter.date_end:
        return False
    if doc_filter.text_terms:
        lemmas = set(doc.lemmas) | set(doc.keywords)
        if any(term not in lemmas for term in doc_filter.text_terms):
            return False
    if doc_filter.geoname_id is not None:
        if all(int(m["geoname_id"]) != doc_filter.geoname_id for m in doc.geo_mentions):
            return False
    return True
