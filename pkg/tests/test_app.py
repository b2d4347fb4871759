import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from medioscope import analytics, geo
from medioscope.api import build_app_from_config
from medioscope.cli import main
from medioscope.config import PACKAGED_DATA, PipelineConfig, load_config, parse_config
from medioscope.errors import ConfigError
from medioscope.jsonutil import dump_json
from medioscope.pipeline import run_pipeline
from medioscope.store import DocFilter, DocStore


class TestConfig:
    def test_parse_and_defaults(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("store_dir = out\nsvm_c = 2.5\nport = 9000\n# comment\n")
        config = load_config(str(path))
        assert config.store_dir == "out"
        assert config.svm_c == 2.5
        assert config.port == 9000
        assert config.timezone == "America/Santiago"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(["nope = 1"])

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(["port = many"])

    def test_missing_path_rejected(self, tmp_path):
        config = PipelineConfig(tweet_stream=str(tmp_path / "absent.ndjson"))
        with pytest.raises(ConfigError):
            config.validate()

    def test_port_range(self):
        config = PipelineConfig(port=99_999)
        with pytest.raises(ConfigError):
            config.validate()


class TestPipeline:
    def test_empty_stream_zero_counts(self, tmp_path):
        stream = tmp_path / "empty.ndjson"
        stream.write_text("")
        config = PipelineConfig(tweet_stream=str(stream), store_dir=str(tmp_path / "store"))
        summary = run_pipeline(config)
        assert all(stage.docs_in == 0 for stage in summary.stages)
        assert (tmp_path / "store" / "run_summary.json").exists()

    def test_demo_fixture_counts(self, demo_config):
        summary = run_pipeline(demo_config)
        assert summary.stage("ingest").docs_in == 60
        assert summary.stage("ingest").docs_out == 60
        assert summary.stage("scrape").extra == {"ok": 60}
        assert summary.stage("classify").docs_out == 60
        assert summary.stage("geotag").docs_out == 60
        assert summary.stage("index").extra["created"] == 60

    def test_rerun_changes_nothing(self, demo_config):
        run_pipeline(demo_config)
        log = Path(demo_config.store_dir) / "store.log"
        before = log.read_bytes()
        second = run_pipeline(demo_config)
        assert second.stage("index").extra == {"created": 0, "unchanged": 60, "updated": 0}
        assert log.read_bytes() == before

    def test_offline_mode_marks_fetch_error(self, demo_config):
        demo_config.fetcher_mode = "offline"
        demo_config.fixture_pages = None
        summary = run_pipeline(demo_config)
        assert summary.stage("scrape").extra == {"fetch_error": 60}


class TestCli:
    def test_exit_0_on_success(self, demo_config, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text(
            "\n".join(
                [
                    f"tweet_stream = {demo_config.tweet_stream}",
                    f"labeled_corpus = {demo_config.labeled_corpus}",
                    f"gazetteer = {demo_config.gazetteer}",
                    f"store_dir = {tmp_path / 'store'}",
                    "fetcher_mode = stub",
                    f"fixture_pages = {demo_config.fixture_pages}",
                ]
            )
        )
        assert main(["ingest", "--config", str(conf)]) == 0
        out = capsys.readouterr().out
        assert "ingest" in out and "index" in out

    def test_exit_1_usage(self, capsys):
        assert main(["no-such-command"]) == 1
        assert main(["evaluate"]) == 1  # missing required --corpus

    def test_exit_2_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.ndjson"
        bad.write_text('{"id": "x", "text": "hola", "label": "inventado"}\n')
        assert main(["evaluate", "--corpus", str(bad)]) == 2
        missing = tmp_path / "run.conf"
        missing.write_text(f"tweet_stream = {tmp_path / 'no.ndjson'}\n")
        assert main(["ingest", "--config", str(missing)]) == 2

    def test_exit_3_internal(self, tmp_path, capsys):
        broken = tmp_path / "model.json"
        broken.write_text("{not json")
        assert main(["classify", "--model", str(broken), "--text", "hola"]) == 3

    def test_train_tagger_round_trip(self, tmp_path, capsys):
        out = tmp_path / "tagger.json"
        corpus = PACKAGED_DATA / "tagged_corpus_es.tsv"
        assert main(["train-tagger", "--corpus", str(corpus), "--out", str(out)]) == 0
        assert out.exists()

    def test_evaluate_prints_table(self, demo_config, capsys):
        code = main(
            ["evaluate", "--corpus", demo_config.labeled_corpus, "--folds", "5", "--show-reference"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "Temas" in out and "Precisión" in out and "Exhaustividad" in out
        assert "Salud" in out

    def test_geotag_text(self, capsys):
        gaz = PACKAGED_DATA / "gazetteer_fixture.tsv"
        code = main(["geotag", "--gazetteer", str(gaz), "--text", "el presidente visitó Valdivia"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["mentions"][0]["name"] == "Valdivia"
        assert payload["mentions"][0]["country_code"] == "CL"

    def test_classify_and_geotag_store_modes(self, demo_config, tmp_path, capsys):
        # ingest without classifier or gazetteer, then annotate via the store
        bare = PipelineConfig(
            tweet_stream=demo_config.tweet_stream,
            store_dir=str(tmp_path / "store"),
            fetcher_mode="stub",
            fixture_pages=demo_config.fixture_pages,
        )
        run_pipeline(bare)
        with DocStore(bare.store_dir, create=False) as store:
            assert all(d.topic is None for d in store.all_docs())

        model_path = tmp_path / "model.json"
        assert main(
            ["train-classifier", "--corpus", demo_config.labeled_corpus, "--out", str(model_path)]
        ) == 0
        assert main(["classify", "--model", str(model_path), "--store", bare.store_dir]) == 0
        assert main(
            ["geotag", "--gazetteer", demo_config.gazetteer, "--store", bare.store_dir]
        ) == 0
        with DocStore(bare.store_dir, create=False) as store:
            docs = store.all_docs()
            assert all(d.topic is not None for d in docs)
            assert any(d.geo_mentions for d in docs)
            assert len(store.audit_log) > 0  # annotations are versioned overwrites


@pytest.fixture(scope="module")
def served(tmp_path_factory, demo_dir):
    config = PipelineConfig(
        tweet_stream=str(demo_dir / "tweets.ndjson"),
        labeled_corpus=str(demo_dir / "labeled.ndjson"),
        gazetteer=str(PACKAGED_DATA / "gazetteer_fixture.tsv"),
        store_dir=str(tmp_path_factory.mktemp("api") / "store"),
        fetcher_mode="stub",
        fixture_pages=str(demo_dir / "pages.ndjson"),
    )
    run_pipeline(config)
    app = build_app_from_config(config)
    with DocStore(config.store_dir, create=False) as store:
        docs = store.all_docs()
    return TestClient(app), docs, config


class TestApi:
    def test_health(self, served):
        client, docs, _ = served
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json()["store"]["docs"] == len(docs)

    def test_media_roster(self, served):
        client, _, _ = served
        media = client.get("/media").json()
        assert len(media) == 37
        assert media == sorted(media, key=lambda m: m["handle"])

    def test_news_filter_and_pagination(self, served):
        client, docs, _ = served
        expected_total = sum(1 for d in docs if d.topic == "deportes")
        seen = []
        offset = 0
        while True:
            page = client.get(
                "/news", params={"topic": "deportes", "offset": offset, "limit": 4}
            ).json()
            assert page["total"] == expected_total
            if not page["docs"]:
                break
            seen.extend(d["doc_id"] for d in page["docs"])
            offset += 4
        assert len(seen) == expected_total
        assert len(set(seen)) == expected_total

    def test_api_module_equivalence_topics(self, served):
        client, docs, _ = served
        response = client.get("/metrics/topics")
        module_result = analytics.topic_shares(
            [d for d in docs if d.topic is not None], group_by="ALL"
        )
        assert response.content == dump_json([ts.to_dict() for ts in module_result])

    def test_api_module_equivalence_topics_per_medium(self, served):
        client, docs, _ = served
        handle = docs[0].medium_handle
        response = client.get("/metrics/topics", params={"medium": handle})
        module_result = analytics.topic_shares(
            [d for d in docs if d.topic is not None and d.medium_handle == handle],
            group_by="medium",
        )
        assert response.content == dump_json([ts.to_dict() for ts in module_result])

    def test_api_module_equivalence_geo(self, served):
        client, docs, _ = served
        response = client.get("/metrics/geo")
        module_result = geo.aggregate_geo([m for d in docs for m in d.geo_mentions])
        assert response.content == dump_json(module_result)

    def test_api_module_equivalence_volume(self, served):
        client, docs, config = served
        response = client.get("/metrics/volume", params={"granularity": "month"})
        module_result = analytics.volume_series(
            docs,
            granularity="month",
            timezone=config.timezone,
            weights=[d.emission_count for d in docs],
        )
        assert response.content == dump_json(module_result.to_dict())

    def test_api_module_equivalence_concentration(self, served):
        client, docs, _ = served
        response = client.get("/metrics/concentration", params={"k": 5})
        assert response.content == dump_json(analytics.concentration(docs, 5))

    def test_facets_equal_store(self, served):
        client, docs, config = served
        response = client.get("/facets", params={"field": "topic"})
        with DocStore(config.store_dir, create=False) as store:
            module_result = store.facet_counts(DocFilter(), "topic")
        assert response.content == dump_json(module_result.to_dict())

    def test_malformed_date_400(self, served):
        client, _, _ = served
        response = client.get("/news", params={"date_start": "10-2015"})
        assert response.status_code == 400
        body = response.json()
        assert body["error"]["code"] == "bad_request"
        assert "date_start" in body["error"]["message"]

    def test_empty_range_400(self, served):
        client, _, _ = served
        response = client.get(
            "/news", params={"date_start": "2015-10-10", "date_end": "2015-10-01"}
        )
        assert response.status_code == 400

    def test_unknown_facet_400(self, served):
        client, _, _ = served
        assert client.get("/facets", params={"field": "nope"}).status_code == 400

    def test_cors_header(self, served):
        client, _, _ = served
        response = client.get("/health", headers={"Origin": "http://localhost:5173"})
        assert response.headers.get("access-control-allow-origin") == "*"

    def test_terms_lemmatized_at_query_time(self, served):
        client, docs, _ = served
        # the plural form must hit docs indexed under the singular lemma
        response = client.get("/news", params={"terms": "movilizaciones", "limit": 5})
        assert response.status_code == 200
