"""Record real API responses for the dashboard test suite.

Runs the demo pipeline into a temporary store, serves it with the HTTP API,
and captures the exact response bodies for a set of exploration states. The
dashboard tests replay these bodies through a fetch mock, so every number the
UI shows is checked against genuine backend output.

Usage: python3 scripts/record_fixtures.py  (from the frontend/ directory)
"""

import json
import sys
import tempfile
from pathlib import Path
from urllib.parse import parse_qsl, urlencode

from fastapi.testclient import TestClient

from medioscope.api import build_app_from_config
from medioscope.config import PACKAGED_DATA, PipelineConfig
from medioscope.pipeline import run_pipeline
from medioscope.synthetic import gen_demo_fixture

OUT = Path(__file__).parent.parent / "tests" / "fixtures" / "api_fixtures.json"

STATES = {
    "empty": [],
    "topic": [("topic", "deportes")],
    "topic+medium": [("medium", "emol"), ("topic", "política")],
    "empty-combo": [("medium", "emol"), ("topic", "deportes")],
    "medium": [("medium", "emol")],
    "medium2": [("medium", "biobio")],
    "terms": [("terms", "valdivia")],
    "locality": [("geoname_id", "3871336")],
    "dates": [("date_start", "2015-10-01"), ("date_end", "2015-10-15")],
}


def normalize(path: str, pairs) -> str:
    ordered = sorted(pairs)
    return f"{path}?{urlencode(ordered)}" if ordered else path


def main() -> None:
    tmp = Path(tempfile.mkdtemp(prefix="dashboard-fixtures-"))
    gen_demo_fixture(tmp / "fixtures")
    config = PipelineConfig(
        tweet_stream=str(tmp / "fixtures" / "tweets.ndjson"),
        labeled_corpus=str(tmp / "fixtures" / "labeled.ndjson"),
        gazetteer=str(PACKAGED_DATA / "gazetteer_fixture.tsv"),
        store_dir=str(tmp / "store"),
        fetcher_mode="stub",
        fixture_pages=str(tmp / "fixtures" / "pages.ndjson"),
    )
    run_pipeline(config)
    client = TestClient(build_app_from_config(config))

    recorded: dict[str, object] = {}

    def record(path: str, pairs) -> None:
        url = normalize(path, pairs)
        response = client.get(path, params=pairs)
        assert response.status_code == 200, (url, response.status_code)
        recorded[url] = response.json()

    record("/media", [])
    for pairs in STATES.values():
        record("/news", pairs + [("limit", "10"), ("offset", "0")])
        record("/metrics/volume", pairs + [("granularity", "day")])
        record("/metrics/topics", pairs)
        record("/facets", pairs + [("field", "medium")])
        record("/metrics/geo", pairs)
    # second result page for the unfiltered state
    record("/news", [("limit", "10"), ("offset", "10")])

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(recorded, ensure_ascii=False, indent=1, sort_keys=True))
    print(f"recorded {len(recorded)} responses -> {OUT}")


if __name__ == "__main__":
    sys.exit(main())
