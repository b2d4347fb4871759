"""Read-only HTTP API over the document store.

Every response body is produced by serializing the corresponding module
call's result with the canonical JSON encoder, so API output and direct
module output are byte-equivalent. Malformed parameters return 400 with a
machine-readable error body.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import analytics, geo
from .config import PipelineConfig
from .errors import DataError, MedioscopeError, QueryError
from .jsonutil import dump_json
from .pipeline import TextAnalyzer, build_analyzer
from .store import FACET_FIELDS, DocFilter, DocStore


class ApiError(Exception):
    def __init__(self, message: str, status: int = 400, code: str = "bad_request"):
        super().__init__(message)
        self.status = status
        self.code = code


def _json(payload, status: int = 200) -> Response:
    return Response(content=dump_json(payload), status_code=status, media_type="application/json")


def _error(message: str, status: int = 400, code: str = "bad_request") -> Response:
    return _json({"error": {"code": code, "message": message}}, status=status)


def _multi(request: Request, name: str) -> Optional[list[str]]:
    values: list[str] = []
    for raw in request.query_params.getlist(name):
        values.extend(v.strip() for v in raw.split(",") if v.strip())
    return values or None


def _parse_date(raw: Optional[str], name: str) -> Optional[date]:
    if raw is None or raw == "":
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError as exc:
        raise ApiError(f"bad {name}: {raw!r} is not an ISO date") from exc


def _parse_int(raw: Optional[str], name: str, default: Optional[int] = None) -> Optional[int]:
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ApiError(f"bad {name}: {raw!r} is not an integer") from exc


def filter_from_params(request: Request, analyzer: Optional[TextAnalyzer]) -> DocFilter:
    terms = _multi(request, "terms")
    if terms and analyzer is not None:
        lemmatized: list[str] = []
        for term in terms:
            lemmas = analyzer.lemmas(term)
            lemmatized.extend(lemmas if lemmas else [term.casefold()])
        terms = lemmatized
    return DocFilter(
        media=_multi(request, "medium"),
        topics=_multi(request, "topic"),
        date_start=_parse_date(request.query_params.get("date_start"), "date_start"),
        date_end=_parse_date(request.query_params.get("date_end"), "date_end"),
        text_terms=terms,
        geoname_id=_parse_int(request.query_params.get("geoname_id"), "geoname_id"),
    )


def create_app(
    store: DocStore,
    roster: list[analytics.MediumProfile],
    analyzer: Optional[TextAnalyzer] = None,
    cors_origin: str = "*",
    timezone: str = analytics.DEFAULT_TIMEZONE,
) -> FastAPI:
    app = FastAPI(title="medioscope", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError) -> Response:
        return _error(str(exc), status=exc.status, code=exc.code)

    @app.exception_handler(QueryError)
    async def _query_error(request: Request, exc: QueryError) -> Response:
        return _error(str(exc))

    @app.exception_handler(DataError)
    async def _data_error(request: Request, exc: DataError) -> Response:
        return _error(str(exc), status=422, code="data_error")

    def filtered_docs(request: Request):
        doc_filter = filter_from_params(request, analyzer)
        doc_filter.validate()
        result = store.query(doc_filter, offset=0, limit=max(1, len(store)))
        return result.docs

    @app.get("/health")
    def health() -> Response:
        return _json({"status": "ok", "store": store.stats()})

    @app.get("/media")
    def media(request: Request) -> Response:
        rows = [p.to_dict() for p in sorted(roster, key=lambda p: p.handle)]
        return _json(_paginate(request, rows))

    @app.get("/news")
    def news(request: Request) -> Response:
        doc_filter = filter_from_params(request, analyzer)
        offset = _parse_int(request.query_params.get("offset"), "offset", 0)
        limit = _parse_int(request.query_params.get("limit"), "limit", 20)
        result = store.query(doc_filter, offset=offset, limit=limit)
        return _json(
            {
                "total": result.total,
                "offset": result.offset,
                "limit": result.limit,
                "docs": [d.to_dict() for d in result.docs],
            }
        )

    @app.get("/facets")
    def facets(request: Request) -> Response:
        field = request.query_params.get("field")
        if field is None:
            raise ApiError(f"missing facet field; expected one of {FACET_FIELDS}")
        doc_filter = filter_from_params(request, analyzer)
        return _json(store.facet_counts(doc_filter, field).to_dict())

    @app.get("/metrics/volume")
    def volume(request: Request) -> Response:
        granularity = request.query_params.get("granularity", "day")
        unit = request.query_params.get("unit", "emissions")
        if unit not in ("emissions", "docs"):
            raise ApiError(f"bad unit {unit!r}: expected emissions or docs")
        docs = filtered_docs(request)
        weights = [d.emission_count for d in docs] if unit == "emissions" else None
        series = analytics.volume_series(docs, granularity=granularity, timezone=timezone, weights=weights)
        return _json(series.to_dict())

    @app.get("/metrics/topics")
    def topics(request: Request) -> Response:
        per_medium = request.query_params.get("per_medium") == "1"
        has_medium = _multi(request, "medium") is not None
        docs = [d for d in filtered_docs(request) if d.topic is not None]
        group_by = "medium" if (per_medium or has_medium) else "ALL"
        return _json([ts.to_dict() for ts in analytics.topic_shares(docs, group_by=group_by)])

    @app.get("/metrics/tendencies")
    def tendencies(request: Request) -> Response:
        docs = [d for d in filtered_docs(request) if d.topic is not None]
        return _json(analytics.tendency_report(docs))

    @app.get("/metrics/concentration")
    def concentration(request: Request) -> Response:
        k = _parse_int(request.query_params.get("k"), "k", 10)
        docs = filtered_docs(request)
        return _json(analytics.concentration(docs, k))

    @app.get("/metrics/geo")
    def geo_metrics(request: Request) -> Response:
        docs = filtered_docs(request)
        mentions = [m for d in docs for m in d.geo_mentions]
        return _json(_paginate(request, geo.aggregate_geo(mentions)))

    return app


def _paginate(request: Request, rows: list) -> list:
    """Optional offset/limit slicing on list endpoints; full list by default."""
    offset = _parse_int(request.query_params.get("offset"), "offset", 0)
    limit = _parse_int(request.query_params.get("limit"), "limit")
    if limit is not None and limit < 1:
        raise ApiError("limit must be >= 1")
    end = None if limit is None else offset + limit
    return rows[offset:end]


def build_app_from_config(config: PipelineConfig) -> FastAPI:
    store = DocStore(config.store_dir, create=False)
    roster_path = Path(config.media_roster)
    roster = analytics.load_media_roster(roster_path.read_text(encoding="utf-8").splitlines())
    analyzer = build_analyzer(config)
    return create_app(
        store, roster, analyzer, cors_origin=config.cors_origin, timezone=config.timezone
    )


def serve(config: PipelineConfig) -> None:
    """Run the HTTP service until interrupted; read-only against the store."""
    import uvicorn

    app = build_app_from_config(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except OSError as exc:
        raise MedioscopeError(f"cannot bind {config.host}:{config.port}: {exc}") from exc
