"""Gazetteer loading, toponym spotting and in-country disambiguation.

The gazetteer is a tab-separated subset of the GeoNames dump:
geonameid, name, asciiname, alternatenames (comma-joined), latitude,
longitude, feature_class, feature_code, country_code, population.

Lookup keys are case-folded and accent-folded; the lowercase-verb rejection
("caen" the verb vs Caen the city) runs on the original surface casing.
Disambiguation keeps localities in the news item's country; country-level
entries (feature_class A) bypass the filter so foreign coverage still
surfaces at country granularity.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import GazetteerError
from .nlp.tokens import KIND_WORD, Token

DEFAULT_MAX_NGRAM = 3

FEATURE_PLACE = "P"
FEATURE_ADMIN = "A"

# Tag prefixes whose lowercase single-word matches are spurious toponyms.
REJECT_TAG_PREFIXES = ("V", "ART", "DET", "PREP", "CONJ", "PRON")


@dataclass
class GazetteerEntry:
    geoname_id: int
    name: str
    ascii_name: str
    alternate_names: list[str]
    latitude: float
    longitude: float
    feature_class: str
    feature_code: str
    country_code: str
    population: int


@dataclass
class ToponymCandidate:
    surface: str
    span: tuple[int, int]
    entries: list[GazetteerEntry]


@dataclass
class GeoMention:
    surface: str
    span: tuple[int, int]
    entry: GazetteerEntry
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "start": self.span[0],
            "end": self.span[1],
            "geoname_id": self.entry.geoname_id,
            "name": self.entry.name,
            "lat": self.entry.latitude,
            "lon": self.entry.longitude,
            "country_code": self.entry.country_code,
            "feature_class": self.entry.feature_class,
            "notes": list(self.notes),
        }


def normalize_name(name: str) -> str:
    """Case-fold, strip accents, collapse whitespace."""
    folded = unicodedata.normalize("NFD", name.casefold())
    stripped = "".join(ch for ch in folded if unicodedata.category(ch) != "Mn")
    return " ".join(stripped.split())


class GazetteerIndex:
    def __init__(self) -> None:
        self._by_key: dict[str, list[GazetteerEntry]] = {}
        self.row_count = 0
        self.skipped_rows = 0

    def add(self, entry: GazetteerEntry) -> None:
        self.row_count += 1
        seen: set[str] = set()
        for name in [entry.name, entry.ascii_name, *entry.alternate_names]:
            key = normalize_name(name)
            if not key or key in seen:
                continue
            seen.add(key)
            self._by_key.setdefault(key, []).append(entry)

    def lookup(self, name: str) -> list[GazetteerEntry]:
        return list(self._by_key.get(normalize_name(name), []))

    def __contains__(self, name: str) -> bool:
        return normalize_name(name) in self._by_key

    def stats(self) -> dict:
        entries = list(self._iter_entries())
        return {
            "rows": self.row_count,
            "distinct_names": len(self._by_key),
            "countries": sum(1 for e in entries if e.feature_class == FEATURE_ADMIN),
            "places": sum(1 for e in entries if e.feature_class == FEATURE_PLACE),
            "skipped_rows": self.skipped_rows,
        }

    def _iter_entries(self) -> Iterable[GazetteerEntry]:
        seen: set[int] = set()
        for entries in self._by_key.values():
            for entry in entries:
                if entry.geoname_id not in seen:
                    seen.add(entry.geoname_id)
                    yield entry


def _parse_row(row: str) -> Optional[GazetteerEntry]:
    parts = row.split("\t")
    if len(parts) != 10:
        return None
    try:
        latitude = float(parts[4])
        longitude = float(parts[5])
        entry = GazetteerEntry(
            geoname_id=int(parts[0]),
            name=parts[1],
            ascii_name=parts[2],
            alternate_names=[a.strip() for a in parts[3].split(",") if a.strip()],
            latitude=latitude,
            longitude=longitude,
            feature_class=parts[6],
            feature_code=parts[7],
            country_code=parts[8],
            population=int(parts[9]) if parts[9].strip() else 0,
        )
    except ValueError:
        return None
    if not entry.name or not (-90.0 <= latitude <= 90.0) or not (-180.0 <= longitude <= 180.0):
        return None
    if len(entry.country_code) != 2:
        return None
    if entry.population < 0:
        return None
    return entry


def load_gazetteer(lines: Iterable[str]) -> GazetteerIndex:
    """Build the lookup index; malformed rows are skipped and counted."""
    index = GazetteerIndex()
    try:
        for line in lines:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            entry = _parse_row(line)
            if entry is None:
                index.skipped_rows += 1
                continue
            index.add(entry)
    except (OSError, UnicodeDecodeError) as exc:
        raise GazetteerError(f"unreadable gazetteer: {exc}") from exc
    if index.row_count == 0:
        raise GazetteerError("gazetteer has no valid rows")
    return index


def _is_rejectable(token: Token) -> bool:
    if not token.surface.islower():
        return False
    tag = (token.pos or "").upper()
    return any(tag.startswith(prefix) for prefix in REJECT_TAG_PREFIXES)


def match_toponyms(
    tokens: list[Token],
    index: GazetteerIndex,
    max_ngram: int = DEFAULT_MAX_NGRAM,
) -> list[ToponymCandidate]:
    """Longest-match-first scan over contiguous word-token n-grams.

    An accepted match consumes its tokens, so no shorter candidate can
    overlap it. Lowercase single words tagged verb/function are rejected
    before their lookup results count.
    """
    candidates: list[ToponymCandidate] = []
    runs: list[list[Token]] = []
    current: list[Token] = []
    for token in tokens:
        if token.kind == KIND_WORD:
            current.append(token)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)

    for run in runs:
        i = 0
        while i < len(run):
            matched_n = 0
            for n in range(min(max_ngram, len(run) - i), 0, -1):
                window = run[i : i + n]
                surface = " ".join(t.surface for t in window)
                if n == 1 and _is_rejectable(window[0]):
                    continue
                entries = index.lookup(surface)
                if entries:
                    candidates.append(
                        ToponymCandidate(
                            surface=surface,
                            span=(window[0].span[0], window[-1].span[1]),
                            entries=entries,
                        )
                    )
                    matched_n = n
                    break
            i += matched_n if matched_n else 1
    return candidates


def disambiguate(candidates: list[ToponymCandidate], country_hint: str) -> list[GeoMention]:
    """Keep in-country localities; country-level entries bypass the filter.

    Several survivors for one surface resolve by highest population, then
    lowest geoname id. Candidates with no surviving entry are dropped.
    """
    if len(country_hint) != 2 or not country_hint.isalpha():
        raise GazetteerError(f"invalid country hint {country_hint!r}")
    hint = country_hint.upper()
    mentions: list[GeoMention] = []
    for candidate in candidates:
        in_country = [e for e in candidate.entries if e.country_code == hint]
        if in_country:
            entry = _pick(in_country)
            notes = ["in_country"]
            if len(in_country) > 1:
                notes.append("population_tiebreak")
        else:
            country_level = [e for e in candidate.entries if e.feature_class == FEATURE_ADMIN]
            if not country_level:
                continue
            entry = _pick(country_level)
            notes = ["country_bypass"]
        mentions.append(GeoMention(surface=candidate.surface, span=candidate.span, entry=entry, notes=notes))
    return mentions


def _pick(entries: list[GazetteerEntry]) -> GazetteerEntry:
    return min(entries, key=lambda e: (-e.population, e.geoname_id))


def aggregate_geo(mentions: Iterable[GeoMention | dict]) -> list[dict]:
    """Mention counts per locality, sorted by count descending then id."""
    counts: dict[int, dict] = {}
    for mention in mentions:
        if isinstance(mention, GeoMention):
            row = mention.to_dict()
        else:
            row = mention
        gid = int(row["geoname_id"])
        agg = counts.get(gid)
        if agg is None:
            counts[gid] = {
                "geoname_id": gid,
                "name": row["name"],
                "lat": row["lat"],
                "lon": row["lon"],
                "count": 1,
            }
        else:
            agg["count"] += 1
    return sorted(counts.values(), key=lambda r: (-r["count"], r["geoname_id"]))
