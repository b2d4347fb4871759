from datetime import datetime, timezone

from medioscope.ingest import NewsDoc
from medioscope.scrape import (
    FetchResult,
    FetchTransportError,
    StubFetcher,
    extract_article,
    resolve_and_scrape,
)

ARTICLE_HTML = """<html><head><title>Titular de prueba</title></head><body>
<nav><a href="/">inicio</a> <a href="/temas">temas</a> <a href="/mapa">mapa</a></nav>
<div id="contenido"><p>Primera frase del cuerpo principal con suficiente texto informativo.</p>
<p>Segunda frase que sigue aportando contenido relevante del mismo bloque de noticia.</p></div>
<footer><a href="/legal">legal</a> <a href="/rss">rss</a></footer>
</body></html>"""

EXPECTED_BODY = (
    "Primera frase del cuerpo principal con suficiente texto informativo. "
    "Segunda frase que sigue aportando contenido relevante del mismo bloque de noticia."
)


def make_doc(url="https://ex.cl/nota"):
    return NewsDoc(
        doc_id="d1",
        medium_handle="emol",
        published_at=datetime(2015, 10, 1, tzinfo=timezone.utc),
        tweet_text="texto",
        canonical_url=url,
    )


def test_dominant_block_extracted():
    content = extract_article(ARTICLE_HTML)
    assert content.title == "Titular de prueba"
    assert content.body == EXPECTED_BODY


def test_boilerplate_below_threshold_dropped():
    html = ARTICLE_HTML.replace(
        "</p></div>",
        '</p><div class="rel"><a href="/a">a</a><a href="/b">b</a><a href="/c">c</a></div></div>',
    )
    assert extract_article(html).body == EXPECTED_BODY


def test_scrape_success_sets_ok():
    fetcher = StubFetcher()
    fetcher.add("https://ex.cl/nota", ARTICLE_HTML)
    doc = resolve_and_scrape(make_doc(), fetcher)
    assert doc.fetch_status == "ok"
    assert doc.title == "Titular de prueba"
    assert doc.body == EXPECTED_BODY


def test_404_is_fetch_error():
    doc = resolve_and_scrape(make_doc(), StubFetcher())  # unknown urls 404
    assert doc.fetch_status == "fetch_error"
    assert doc.body is None


def test_no_url_is_no_link():
    doc = make_doc(url=None)
    doc.fetch_status = "no_link"
    assert resolve_and_scrape(doc, StubFetcher()).fetch_status == "no_link"


def test_transport_error_never_raises():
    fetcher = StubFetcher({"https://ex.cl/nota": FetchTransportError("timeout")})
    doc = resolve_and_scrape(make_doc(), fetcher)
    assert doc.fetch_status == "fetch_error"


def test_empty_extraction_is_fetch_error():
    fetcher = StubFetcher({"https://ex.cl/nota": FetchResult(status=200, body=b"<html></html>")})
    assert resolve_and_scrape(make_doc(), fetcher).fetch_status == "fetch_error"


def test_ok_implies_nonempty_body():
    fetcher = StubFetcher()
    fetcher.add("https://ex.cl/nota", ARTICLE_HTML)
    doc = resolve_and_scrape(make_doc(), fetcher)
    assert doc.fetch_status == "ok" and len(doc.body) >= 1
