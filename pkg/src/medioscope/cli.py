"""Command-line surface: one subcommand per pipeline capability.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analytics, classify as classifier_mod, geo
from .config import load_config
from .errors import DataError, MedioscopeError
from .jsonutil import dump_json_str
from .nlp.tfidf import document_frequencies
from .nlp.hmm import read_tagged_corpus, train_hmm
from .pipeline import (
    build_analyzer,
    read_labeled_corpus,
    run_pipeline,
    train_labeled,
)
from .store import DocStore

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


@click.group()
def cli() -> None:
    """News-stream mining toolkit: ingest, annotate, index, report, serve."""


def _config_option(func):
    # MEDIOSCOPE_CONFIG is the one supported environment variable
    return click.option(
        "--config",
        "config_path",
        type=click.Path(),
        default=None,
        envvar="MEDIOSCOPE_CONFIG",
        help="key = value config file (or set MEDIOSCOPE_CONFIG)",
    )(func)


@cli.command()
@_config_option
@click.option("--stream", type=click.Path(), default=None, help="tweet NDJSON stream (overrides config)")
@click.option("--store", "store_dir", type=click.Path(), default=None, help="store directory (overrides config)")
def ingest(config_path, stream, store_dir) -> None:
    """Run the full pipeline over a tweet stream into the store."""
    config = load_config(config_path, {"tweet_stream": stream, "store_dir": store_dir})
    summary = run_pipeline(config)
    for line in summary.format_lines():
        click.echo(line)


@cli.command("train-tagger")
@click.option("--corpus", type=click.Path(exists=True), required=True, help="word<TAB>TAG corpus")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--alpha", type=float, default=0.01, show_default=True)
def train_tagger(corpus, out_path, alpha) -> None:
    """Train the POS tagger and write the model file."""
    sentences = read_tagged_corpus(Path(corpus).read_text(encoding="utf-8").splitlines())
    model = train_hmm(sentences, alpha=alpha)
    model.save(out_path)
    click.echo(f"trained tagger: {len(model.tagset)} tags, {len(model.vocabulary)} words -> {out_path}")


@cli.command("train-classifier")
@_config_option
@click.option("--corpus", type=click.Path(exists=True), required=True, help='NDJSON {"id","text","label"}')
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--c", "c_value", type=float, default=None, help="soft-margin constant")
@click.option("--epochs", type=int, default=None)
def train_classifier(config_path, corpus, out_path, c_value, epochs) -> None:
    """Train the ten-topic SVM from a labeled corpus."""
    config = load_config(config_path, {"svm_c": c_value, "svm_epochs": epochs})
    analyzer = build_analyzer(config)
    rows = read_labeled_corpus(Path(corpus), analyzer)
    model = train_labeled(rows, config)
    model.save(out_path)
    click.echo(f"trained classifier: {len(rows)} docs, {len(model.vocabulary)} features -> {out_path}")


@cli.command()
@_config_option
@click.option("--corpus", type=click.Path(exists=True), required=True)
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "json_out", type=click.Path(), default=None, help="write full report as JSON")
@click.option("--localized", is_flag=True, help="comma decimal separator")
@click.option("--show-reference", is_flag=True, help="also print the reference validation table")
def evaluate(config_path, corpus, folds, seed, json_out, localized, show_reference) -> None:
    """10-fold cross-validation with per-class precision/exhaustividad."""
    config = load_config(config_path)
    analyzer = build_analyzer(config)
    rows = read_labeled_corpus(Path(corpus), analyzer)
    stats = document_frequencies([(i, lemmas) for i, lemmas, _ in rows])
    labeled = [(stats.vectorize(i, lemmas), label) for i, lemmas, label in rows]
    params = classifier_mod.SvmParams(c=config.svm_c, epochs=config.svm_epochs)
    report = classifier_mod.cross_validate(labeled, folds=folds, seed=seed, params=params)
    click.echo(classifier_mod.format_report_table(report.per_class(), localized=localized))
    macro_p, macro_r = report.macro()
    click.echo(f"\nmacro: precision={_pct(macro_p, localized)} recall={_pct(macro_r, localized)}")
    for warning in report.warnings:
        click.echo(f"warning: {warning}", err=True)
    if show_reference:
        click.echo("\nreference validation:")
        click.echo(classifier_mod.reference_table(localized=localized))
    if json_out:
        Path(json_out).write_text(dump_json_str(report.to_dict()))
        click.echo(f"report written to {json_out}")


def _pct(value, localized: bool) -> str:
    if value is None:
        return "-"
    text = f"{value * 100:.1f}%"
    return text.replace(".", ",") if localized else text


@cli.command("classify")
@_config_option
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--text", default=None, help="classify a single text")
@click.option("--input", "input_path", type=click.Path(exists=True), default=None, help='NDJSON {"id","text"}')
@click.option("--store", "store_dir", type=click.Path(exists=True), default=None, help="annotate store docs lacking a topic")
def classify_cmd(config_path, model_path, text, input_path, store_dir) -> None:
    """Assign a topic (with margins) to text, NDJSON docs, or store docs."""
    sources = [s for s in (text, input_path, store_dir) if s is not None]
    if len(sources) != 1:
        raise click.UsageError("provide exactly one of --text, --input, --store")
    config = load_config(config_path)
    analyzer = build_analyzer(config)
    model = classifier_mod.ClassifierModel.load(model_path)
    if model.vectorizer is None:
        raise DataError("classifier model lacks vectorizer statistics")

    def classify_one(doc_id: str, content: str) -> dict:
        vector = model.vectorizer.vectorize(doc_id, analyzer.lemmas(content))
        result = classifier_mod.classify(model, vector)
        return {
            "id": doc_id,
            "topic": result.label,
            "low_confidence": result.low_confidence,
            "margins": result.margins,
        }

    if text is not None:
        click.echo(dump_json_str(classify_one("text", text)))
    elif input_path is not None:
        for lineno, line in enumerate(Path(input_path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            click.echo(dump_json_str(classify_one(str(obj.get("id", lineno)), obj["text"])))
    else:
        with DocStore(store_dir, create=False) as store:
            pending = [d for d in store.all_docs() if d.topic is None]
            for doc in pending:
                content = f"{doc.title or ''}\n\n{doc.body}" if doc.body else doc.tweet_text
                doc.topic = classify_one(doc.doc_id, content)["topic"]
                store.index_doc(doc)
            click.echo(f"classified {len(pending)} store documents")


@cli.command()
@_config_option
@click.option("--gazetteer", "gazetteer_path", type=click.Path(exists=True), default=None)
@click.option("--text", default=None)
@click.option("--input", "input_path", type=click.Path(exists=True), default=None, help='NDJSON {"id","text"}')
@click.option("--store", "store_dir", type=click.Path(exists=True), default=None, help="annotate store docs lacking mentions")
@click.option("--country", default=None, help="country hint (ISO alpha-2)")
def geotag(config_path, gazetteer_path, text, input_path, store_dir, country) -> None:
    """Spot and disambiguate localities in text, NDJSON docs, or store docs."""
    sources = [s for s in (text, input_path, store_dir) if s is not None]
    if len(sources) != 1:
        raise click.UsageError("provide exactly one of --text, --input, --store")
    config = load_config(config_path, {"gazetteer": gazetteer_path, "country_hint": country})
    if config.gazetteer is None:
        raise click.UsageError("a gazetteer is required (--gazetteer or config)")
    analyzer = build_analyzer(config)
    with open(config.gazetteer, "r", encoding="utf-8") as fh:
        index = geo.load_gazetteer(fh)

    def mentions_of(content: str) -> list[dict]:
        tokens = analyzer.tagged_tokens(content)
        candidates = geo.match_toponyms(tokens, index, max_ngram=config.max_ngram)
        return [m.to_dict() for m in geo.disambiguate(candidates, config.country_hint)]

    if text is not None:
        click.echo(dump_json_str({"id": "text", "mentions": mentions_of(text)}))
    elif input_path is not None:
        for lineno, line in enumerate(Path(input_path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            click.echo(dump_json_str({"id": str(obj.get("id", lineno)), "mentions": mentions_of(obj["text"])}))
    else:
        with DocStore(store_dir, create=False) as store:
            pending = [d for d in store.all_docs() if not d.geo_mentions]
            for doc in pending:
                content = f"{doc.title or ''}\n\n{doc.body}" if doc.body else doc.tweet_text
                doc.geo_mentions = mentions_of(content)
                store.index_doc(doc)
            click.echo(f"geotagged {len(pending)} store documents")


@cli.command()
@_config_option
@click.option("--store", "store_dir", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), default=None, help="write per-indicator JSON files")
@click.option("--k", type=int, default=10, show_default=True, help="top-k for concentration")
def report(config_path, store_dir, out_dir, k) -> None:
    """Compute all indicators from the store and print a text digest."""
    config = load_config(config_path, {"store_dir": store_dir})
    roster = analytics.load_media_roster(
        Path(config.media_roster).read_text(encoding="utf-8").splitlines()
    )
    with DocStore(store_dir, create=False) as store:
        docs = store.all_docs()
    classified = [d for d in docs if d.topic is not None]

    volume = analytics.volume_series(
        docs, granularity="month", timezone=config.timezone,
        weights=[d.emission_count for d in docs],
    )
    conc = analytics.concentration(docs, k)
    shares = analytics.topic_shares(classified, group_by="ALL") if classified else []
    tendencies = analytics.tendency_report(classified) if classified else []
    geo_agg = geo.aggregate_geo([m for d in docs for m in d.geo_mentions])
    figures = analytics.reference_figures_check()

    indicators = {
        "volume": volume.to_dict(),
        "concentration": conc,
        "topic_shares": [s.to_dict() for s in shares],
        "tendencies": tendencies,
        "geo": geo_agg,
        "media": [p.to_dict() for p in sorted(roster, key=lambda p: p.handle)],
        "reference_figures": figures,
    }

    click.echo(f"documents: {len(docs)} (classified: {len(classified)})")
    click.echo("\nmonthly emission volume:")
    for bucket, count in volume.buckets:
        click.echo(f"  {bucket}  {count}")
    click.echo("\nemissions per medium:")
    per_medium = sorted(conc["per_medium"].items(), key=lambda kv: (-kv[1], kv[0]))
    for handle, count in per_medium[:15]:
        click.echo(f"  {handle:<18} {count}")
    share_txt = f"{conc['share']:.4f}" if conc["share"] is not None else "-"
    click.echo(f"\ntop-{k} concentration: {share_txt} of {conc['total_emissions']} emissions")
    click.echo("\naudience classes:")
    for cls in ("high", "medium", "low"):
        members = sorted(p.handle for p in roster if p.audience_class == cls)
        click.echo(f"  {cls:<7} ({len(members):2}): {', '.join(members[:8])}" + (", …" if len(members) > 8 else ""))
    if shares:
        click.echo("\ntopic shares (all media):")
        for label, value in shares[0].shares.items():
            click.echo(f"  {label:<16} {value * 100:5.1f}%")
    if tendencies:
        click.echo("\neditorial tendencies per medium:")
        for entry in tendencies:
            flags = entry["flags"]
            active = [name for name, on in flags.items() if on]
            click.echo(f"  {entry['group']:<18} {', '.join(active) if active else '-'}")
    if geo_agg:
        click.echo("\ntop localities:")
        for row in geo_agg[:10]:
            click.echo(f"  {row['name']:<20} {row['count']}")
    if not figures["consistent"]:
        click.echo(
            "\nnote: reference summary figures are internally inconsistent: "
            f"monthly list sums to {figures['recomputed_total']} "
            f"(mean {figures['recomputed_mean']}), stated total "
            f"{figures['stated_total']} and mean {figures['stated_mean']}",
            err=True,
        )
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, payload in indicators.items():
            (out / f"{name}.json").write_text(dump_json_str(payload))
        # locality aggregate also in its line-oriented interchange form
        (out / "geo.ndjson").write_text(
            "".join(dump_json_str(row) + "\n" for row in geo_agg)
        )
        click.echo(f"\nindicator files written to {out}")


@cli.command()
@_config_option
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, store_dir, host, port) -> None:
    """Serve the read-only HTTP API over the store."""
    from .api import serve as serve_app

    config = load_config(config_path, {"store_dir": store_dir, "host": host, "port": port})
    serve_app(config)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.exceptions.Exit as exc:
        return EXIT_OK if exc.exit_code == 0 else exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except MedioscopeError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INTERNAL
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
