"""Deterministic synthetic fixtures.

The real six-month crawl behind the reference figures is not distributable,
so reproduction runs on generated corpora whose construction *is* the oracle:
a stream generated with K unique news items must dedupe to exactly K, a
37-media distribution built for a 68% top-10 share must report exactly that,
and so on. Everything here is seeded and reproducible.
"""

from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path
from random import Random
from typing import Optional
from zoneinfo import ZoneInfo

from .analytics import REFERENCE_MONTHLY_EMISSIONS
from .classify import TOPIC_LABELS
from .ingest import NewsDoc, TweetRecord, doc_id_for

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _word(rng: Random, length: int = 7) -> str:
    return "".join(rng.choice(_LETTERS) for _ in range(length))


# ---------------------------------------------------------------------------
# tweet streams


def gen_tweet_records(
    total_emissions: int,
    unique_news: int,
    month: str = "2015-10",
    media: Optional[list[str]] = None,
    seed: int = 7,
    tz: str = "America/Santiago",
) -> list[TweetRecord]:
    """Emission stream with exactly `unique_news` distinct canonical URLs.

    The first `unique_news` records introduce fresh URLs; the rest repeat
    already-seen ones, so dedupe must return exactly `unique_news` docs.
    """
    if unique_news > total_emissions:
        raise ValueError("unique_news cannot exceed total_emissions")
    rng = Random(seed)
    zone = ZoneInfo(tz)
    year, mon = (int(p) for p in month.split("-"))
    media = media or [f"medio{i:02d}" for i in range(1, 11)]
    records: list[TweetRecord] = []
    urls: list[str] = []
    for i in range(total_emissions):
        if i < unique_news:
            url = f"https://noticias{i % 97}.example.cl/{month}/nota-{i}"
            urls.append(url)
        else:
            url = urls[rng.randrange(len(urls))]
        day = rng.randint(1, 28)
        local = datetime(year, mon, day, rng.randint(8, 20), rng.randint(0, 59), tzinfo=zone)
        records.append(
            TweetRecord(
                tweet_id=f"tw-{month}-{i:07d}",
                medium_handle=media[i % len(media)],
                published_at=local.astimezone(timezone.utc),
                text=f"nota {i} {_word(rng)}",
                urls=[url],
            )
        )
    return records


def records_to_ndjson(records: list[TweetRecord]) -> str:
    lines = []
    for r in records:
        lines.append(
            json.dumps(
                {
                    "tweet_id": r.tweet_id,
                    "medium": r.medium_handle,
                    "created_at": r.published_at.isoformat(),
                    "text": r.text,
                    "urls": r.urls,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# labeled topic corpus (disjoint class vocabularies => separable by design)


def class_vocabulary(label: str, size: int = 30) -> list[str]:
    base = label.replace("í", "i").replace("ó", "o")
    return [f"{base}{_LETTERS[i % 26]}{_LETTERS[i // 26]}" for i in range(size)]


def gen_labeled_lemmas(
    docs_per_class: int = 50,
    vocab_per_class: int = 30,
    tokens_per_doc: int = 40,
    seed: int = 11,
    shared_vocab: int = 0,
) -> list[tuple[str, list[str], str]]:
    """(doc_id, lemmas, label) rows; class vocabularies are pairwise disjoint."""
    rng = Random(seed)
    shared = [f"comun{_LETTERS[i % 26]}" for i in range(shared_vocab)]
    rows = []
    for label in TOPIC_LABELS:
        vocab = class_vocabulary(label, vocab_per_class)
        for d in range(docs_per_class):
            lemmas = [vocab[rng.randrange(len(vocab))] for _ in range(tokens_per_doc)]
            if shared:
                lemmas.extend(shared[rng.randrange(len(shared))] for _ in range(tokens_per_doc // 4))
            rows.append((f"{label}-{d:03d}", lemmas, label))
    return rows


def labeled_to_ndjson(rows: list[tuple[str, list[str], str]]) -> str:
    lines = [
        json.dumps({"id": doc_id, "text": " ".join(lemmas), "label": label}, ensure_ascii=False)
        for doc_id, lemmas, label in rows
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# emission series and media distributions


def gen_emission_datetimes(
    monthly_counts: Optional[dict[str, int]] = None,
    tz: str = "America/Santiago",
    seed: int = 3,
) -> list[datetime]:
    """UTC datetimes whose local-month histogram equals monthly_counts exactly."""
    monthly_counts = monthly_counts or dict(REFERENCE_MONTHLY_EMISSIONS)
    rng = Random(seed)
    zone = ZoneInfo(tz)
    out: list[datetime] = []
    for month in sorted(monthly_counts):
        year, mon = (int(p) for p in month.split("-"))
        days = _days_in_month(year, mon)
        for _ in range(monthly_counts[month]):
            local = datetime(
                year, mon, rng.randint(1, days), rng.randint(8, 20), rng.randint(0, 59), tzinfo=zone
            )
            out.append(local.astimezone(timezone.utc))
    return out


def _days_in_month(year: int, month: int) -> int:
    nxt = datetime(year + (month == 12), month % 12 + 1, 1)
    return (nxt - datetime(year, month, 1)).days


def gen_media_emission_counts(
    n_media: int = 37,
    top_k: int = 10,
    top_share: float = 0.68,
    total: int = 100_000,
) -> dict[str, int]:
    """Per-medium counts where the top-k media hold exactly `top_share`."""
    top_total = round(total * top_share)
    rest_total = total - top_total
    rest_n = n_media - top_k
    counts: dict[str, int] = {}
    for i in range(top_k):
        counts[f"grande{i:02d}"] = top_total // top_k + (1 if i < top_total % top_k else 0)
    for i in range(rest_n):
        counts[f"chico{i:02d}"] = rest_total // rest_n + (1 if i < rest_total % rest_n else 0)
    if max(counts[f"chico{i:02d}"] for i in range(rest_n)) >= min(
        counts[f"grande{i:02d}"] for i in range(top_k)
    ):
        raise ValueError("distribution parameters do not keep the top-k on top")
    return counts


# ---------------------------------------------------------------------------
# randomized store corpora


def gen_store_docs(
    n: int = 10_000,
    seed: int = 23,
    media: Optional[list[str]] = None,
    localities: Optional[list[dict]] = None,
    vocab_size: int = 120,
    start: datetime = datetime(2015, 6, 1, tzinfo=timezone.utc),
    days: int = 183,
) -> list[NewsDoc]:
    """Randomized, fully annotated NewsDocs for index/query exercises."""
    rng = Random(seed)
    media = media or [f"medio{i:02d}" for i in range(1, 38)]
    vocab = [f"lema{_word(rng, 5)}{i}" for i in range(vocab_size)]
    localities = localities if localities is not None else [
        {"geoname_id": 3_000_000 + i, "name": f"Ciudad{i}", "lat": -33.0 - i * 0.1, "lon": -70.0 - i * 0.1}
        for i in range(25)
    ]
    docs = []
    for i in range(n):
        published = start + timedelta(
            days=rng.randrange(days), hours=rng.randrange(24), minutes=rng.randrange(60)
        )
        month = f"{published.year:04d}-{published.month:02d}"
        lemmas = sorted({vocab[rng.randrange(vocab_size)] for _ in range(rng.randint(3, 12))})
        mentions = []
        for _ in range(rng.randint(0, 3)):
            loc = localities[rng.randrange(len(localities))]
            mentions.append(
                {
                    "surface": loc["name"],
                    "start": 0,
                    "end": len(loc["name"]),
                    "geoname_id": loc["geoname_id"],
                    "name": loc["name"],
                    "lat": loc["lat"],
                    "lon": loc["lon"],
                    "country_code": "CL",
                    "feature_class": "P",
                    "notes": ["in_country"],
                }
            )
        doc_key = f"https://example.cl/{i}"
        docs.append(
            NewsDoc(
                doc_id=doc_id_for(month, "url", doc_key),
                medium_handle=media[rng.randrange(len(media))],
                published_at=published,
                tweet_text=f"titular {i}",
                canonical_url=doc_key,
                title=f"Titular {i}",
                body=" ".join(lemmas),
                fetch_status="ok",
                topic=TOPIC_LABELS[rng.randrange(len(TOPIC_LABELS))],
                keywords=lemmas[:3],
                lemmas=lemmas,
                geo_mentions=mentions,
                emission_count=rng.randint(1, 4),
            )
        )
    return docs


# ---------------------------------------------------------------------------
# demo corpus: small Spanish stream + stub pages, end-to-end runnable

_TOPIC_POOLS = {
    "accidentes": "choque colisión ruta heridos volcamiento rescate bomberos emergencia carretera víctimas accidente camión",
    "deportes": "fútbol partido selección gol campeonato estadio jugador torneo hinchas arquero entrenador clasificación",
    "ecología": "ecología bosques contaminación reciclaje ambiental parque reserva humedal especies conservación clima energía",
    "economía": "economía inflación banco mercado exportaciones crecimiento impuestos presupuesto empleo inversión peso dólar",
    "entretenimiento": "festival concierto película actriz cantante estreno entradas espectáculo teatro televisión serie música",
    "judicial": "fiscalía tribunal juicio condena prisión robo investigación querella juez delito sentencia detenido",
    "política": "gobierno congreso reforma senado diputados elección ministro presidente votación partido ley política",
    "salud": "hospital vacunas salud pacientes médicos tratamiento clínica enfermedad campaña urgencias remedios contagios",
    "sociedad": "vecinos marcha vivienda comunidad barrio protesta educación escuela familia ciudadanos municipio carnaval",
    "tecnología": "tecnología computadores internet software innovación datos aplicación startup redes digital plataforma robots",
}


def gen_demo_labeled(docs_per_topic: int = 25, seed: int = 17) -> list[tuple[str, str, str]]:
    """(id, text, label) rows in real Spanish vocabulary, one pool per topic."""
    rng = Random(seed)
    rows = []
    for label in TOPIC_LABELS:
        pool = _TOPIC_POOLS[label].split()
        for d in range(docs_per_topic):
            words = [pool[rng.randrange(len(pool))] for _ in range(rng.randint(8, 14))]
            rows.append((f"{label}-{d:03d}", "la " + " ".join(words), label))
    return rows


_DEMO_SENTENCES = [
    ("deportes", "La selección ganó el partido de fútbol en Santiago y los hinchas celebraron en Valdivia"),
    ("política", "El gobierno anunció una reforma política tras la sesión del congreso en Valparaíso"),
    ("economía", "La economía creció y el banco central publicó cifras de inflación en Santiago"),
    ("judicial", "La fiscalía investiga un robo en Concepción y el tribunal dictó prisión preventiva"),
    ("salud", "El hospital de Temuco sumó vacunas y una campaña de salud para el invierno"),
    ("accidentes", "Un choque en la ruta dejó heridos cerca de Rancagua según carabineros"),
    ("ecología", "Una campaña de ecología busca limpiar la playa y proteger bosques en Puerto Montt"),
    ("entretenimiento", "El festival de entretenimiento anunció artistas y entradas en Viña del Mar"),
    ("sociedad", "Vecinos de Iquique organizaron una marcha por la vivienda y la sociedad civil"),
    ("tecnología", "Una empresa de tecnología presentó computadores nuevos en Antofagasta"),
]


# roster handles the demo stream publishes under
_DEMO_MEDIA = [
    "24horas", "tvn", "tele13", "cnnchile", "biobio", "cooperativa",
    "latercera", "emol", "adnradiochile", "chilevision", "lacuarta", "ahoranoticias",
]


def gen_demo_fixture(out_dir: str | Path, tweets_per_topic: int = 6, seed: int = 5) -> dict:
    """Write tweets.ndjson, pages.ndjson and labeled.ndjson under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = Random(seed)
    zone = ZoneInfo("America/Santiago")
    records = []
    pages = []
    idx = 0
    for topic, sentence in _DEMO_SENTENCES:
        for rep in range(tweets_per_topic):
            url = f"https://demo.example.cl/{topic}/nota-{rep}"
            html = (
                "<html><head><title>Nota {0}</title></head><body>"
                "<nav><a href='/'>inicio</a><a href='/temas'>temas</a></nav>"
                "<div id='main'><p>{1}. {1}. Más detalles de la nota {0} aquí.</p></div>"
                "<footer><a href='/legal'>legal</a></footer></body></html>"
            ).format(idx, sentence)
            pages.append({"url": url, "status": 200, "html": html})
            local = datetime(2015, 10, rng.randint(1, 28), rng.randint(8, 20), rng.randint(0, 59), tzinfo=zone)
            records.append(
                TweetRecord(
                    tweet_id=f"demo-{idx:05d}",
                    medium_handle=_DEMO_MEDIA[idx % len(_DEMO_MEDIA)],
                    published_at=local.astimezone(timezone.utc),
                    text=sentence,
                    urls=[url],
                )
            )
            idx += 1
    (out / "tweets.ndjson").write_text(records_to_ndjson(records), encoding="utf-8")
    (out / "pages.ndjson").write_text(
        "\n".join(json.dumps(p, ensure_ascii=False) for p in pages) + "\n", encoding="utf-8"
    )
    labeled = gen_demo_labeled()
    (out / "labeled.ndjson").write_text(
        "\n".join(
            json.dumps({"id": i, "text": t, "label": l}, ensure_ascii=False) for i, t, l in labeled
        )
        + "\n",
        encoding="utf-8",
    )
    return {"tweets": len(records), "pages": len(pages), "labeled": len(labeled)}


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    written = gen_demo_fixture(target)
    print(f"wrote demo fixture to {target}: {written}")
