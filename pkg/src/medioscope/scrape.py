"""Article fetching and boilerplate-free text extraction.

The fetcher is an injected interface so the pipeline runs offline in tests
(StubFetcher) and online in production (LiveFetcher). Extraction keeps the
largest contiguous block of high text-to-markup density and drops boilerplate
containers that fall below the density threshold.
"""

from __future__ import annotations

import re
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from html.parser import HTMLParser
from typing import Optional, Protocol

from .ingest import FETCH_ERROR, FETCH_NO_LINK, FETCH_OK, NewsDoc

DEFAULT_MIN_DENSITY = 0.5
DEFAULT_TIMEOUT = 10.0

# Subtrees that never contribute article text.
_SKIP_TAGS = {"script", "style", "noscript", "nav", "header", "footer", "aside", "form", "iframe", "svg"}
# Containers eligible to be the article block.
_BLOCK_TAGS = {"article", "main", "div", "section", "td", "body"}
_VOID_TAGS = {"br", "hr", "img", "input", "meta", "link", "area", "base", "col", "embed", "source", "track", "wbr"}


class FetchTransportError(Exception):
    """Network-level failure (timeout, DNS, connection reset)."""


@dataclass
class FetchResult:
    status: int
    body: bytes
    content_type: str = "text/html; charset=utf-8"


class Fetcher(Protocol):
    def fetch(self, url: str) -> FetchResult: ...


@dataclass
class ArticleContent:
    title: str
    body: str
    extracted_at: datetime


class StubFetcher:
    """Deterministic in-memory fetcher for offline runs and tests."""

    def __init__(self, pages: Optional[dict[str, FetchResult | Exception]] = None):
        self.pages = dict(pages or {})
        self.calls: list[str] = []

    def add(self, url: str, html: str, status: int = 200) -> None:
        self.pages[url] = FetchResult(status=status, body=html.encode("utf-8"))

    def fetch(self, url: str) -> FetchResult:
        self.calls.append(url)
        result = self.pages.get(url)
        if result is None:
            return FetchResult(status=404, body=b"not found")
        if isinstance(result, Exception):
            raise result
        return result


class LiveFetcher:
    """Plain HTTP client over urllib; one GET per call, no retries."""

    def __init__(self, timeout: float = DEFAULT_TIMEOUT, user_agent: str = "medioscope/0.1"):
        self.timeout = timeout
        self.user_agent = user_agent

    def fetch(self, url: str) -> FetchResult:
        req = urllib.request.Request(url, headers={"User-Agent": self.user_agent})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return FetchResult(
                    status=resp.status,
                    body=resp.read(),
                    content_type=resp.headers.get("Content-Type", "text/html"),
                )
        except urllib.error.HTTPError as exc:
            return FetchResult(status=exc.code, body=exc.read() or b"", content_type="text/html")
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise FetchTransportError(str(exc)) from exc


@dataclass
class _Node:
    tag: str
    parent: Optional["_Node"]
    children: list["_Node"] = field(default_factory=list)
    texts: list[str] = field(default_factory=list)
    own_markup: int = 0  # chars of this node's start/end tags
    skipped: bool = False


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = _Node(tag="#root", parent=None)
        self.cursor = self.root
        self.title_parts: list[str] = []
        self._in_title = False

    def handle_starttag(self, tag, attrs):
        raw = self.get_starttag_text() or f"<{tag}>"
        if tag == "title":
            self._in_title = True
        if tag in _VOID_TAGS:
            self.cursor.own_markup += len(raw)
            return
        node = _Node(tag=tag, parent=self.cursor, own_markup=len(raw))
        node.skipped = tag in _SKIP_TAGS or self.cursor.skipped
        self.cursor.children.append(node)
        self.cursor = node

    def handle_startendtag(self, tag, attrs):
        raw = self.get_starttag_text() or f"<{tag}/>"
        self.cursor.own_markup += len(raw)

    def handle_endtag(self, tag):
        if tag == "title":
            self._in_title = False
        if tag in _VOID_TAGS:
            return
        # close the nearest matching open node; ignore stray end tags
        node = self.cursor
        while node is not self.root and node.tag != tag:
            node = node.parent
        if node is self.root:
            return
        node.own_markup += len(tag) + 3  # "</tag>"
        self.cursor = node.parent or self.root

    def handle_data(self, data):
        if self._in_title:
            self.title_parts.append(data)
            return
        if data.strip():
            self.cursor.texts.append(data)


def _text_len(node: _Node) -> int:
    if node.skipped:
        return 0
    total = sum(len(_collapse(t)) for t in node.texts)
    return total + sum(_text_len(c) for c in node.children)


def _markup_len(node: _Node) -> int:
    return node.own_markup + sum(_markup_len(c) for c in node.children)


def _density(node: _Node) -> float:
    text = _text_len(node)
    markup = _markup_len(node)
    if text + markup == 0:
        return 0.0
    return text / (text + markup)


_WS = re.compile(r"\s+")


def _collapse(text: str) -> str:
    return _WS.sub(" ", text).strip()


def _collect_text(node: _Node, min_density: float, pieces: list[str]) -> None:
    if node.skipped:
        return
    for t in node.texts:
        cleaned = _collapse(t)
        if cleaned:
            pieces.append(cleaned)
    for child in node.children:
        # drop boilerplate sub-containers that fall under the threshold
        if child.tag in _BLOCK_TAGS and _text_len(child) > 0 and _density(child) < min_density:
            continue
        _collect_text(child, min_density, pieces)


def _candidates(node: _Node, out: list[_Node]) -> None:
    if node.tag in _BLOCK_TAGS and not node.skipped:
        out.append(node)
    for child in node.children:
        _candidates(child, out)


def extract_article(html: str, min_density: float = DEFAULT_MIN_DENSITY) -> ArticleContent:
    """Pick the densest large text block of the page as the article body."""
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()

    candidates: list[_Node] = []
    _candidates(builder.root, candidates)
    best: Optional[_Node] = None
    best_len = 0
    for node in candidates:
        if _density(node) < min_density:
            continue
        length = _text_len(node)
        if length > best_len:
            best, best_len = node, length

    pieces: list[str] = []
    if best is not None:
        _collect_text(best, min_density, pieces)
    else:
        _collect_text(builder.root, min_density, pieces)
    body = " ".join(pieces)

    title = _collapse("".join(builder.title_parts))
    if not title:
        title = _first_heading(builder.root) or ""
    return ArticleContent(title=title, body=body, extracted_at=datetime.now(timezone.utc))


def _first_heading(node: _Node) -> Optional[str]:
    if node.tag in {"h1", "h2"} and not node.skipped:
        pieces: list[str] = []
        _collect_text(node, 0.0, pieces)
        if pieces:
            return " ".join(pieces)
    for child in node.children:
        found = _first_heading(child)
        if found:
            return found
    return None


def _decode_body(result: FetchResult) -> str:
    charset = "utf-8"
    match = re.search(r"charset=([\w\-]+)", result.content_type or "")
    if match:
        charset = match.group(1)
    try:
        return result.body.decode(charset, errors="replace")
    except LookupError:
        return result.body.decode("utf-8", errors="replace")


def resolve_and_scrape(
    doc: NewsDoc,
    fetcher: Fetcher,
    min_density: float = DEFAULT_MIN_DENSITY,
) -> NewsDoc:
    """Fetch the article behind doc.canonical_url and fill title/body.

    Never raises on remote failure: transport errors and non-2xx statuses set
    fetch_status and leave the body absent.
    """
    if doc.canonical_url is None:
        if doc.fetch_status is None:
            doc.fetch_status = FETCH_NO_LINK
        return doc
    try:
        result = fetcher.fetch(doc.canonical_url)
    except FetchTransportError:
        doc.fetch_status = FETCH_ERROR
        return doc
    if not (200 <= result.status < 300):
        doc.fetch_status = FETCH_ERROR
        return doc
    content = extract_article(_decode_body(result), min_density=min_density)
    if not content.body:
        doc.fetch_status = FETCH_ERROR
        return doc
    doc.title = content.title or None
    doc.body = content.body
    doc.fetch_status = FETCH_OK
    return doc
