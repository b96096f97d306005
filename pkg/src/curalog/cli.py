"""Command-line entry point chaining the full pipeline.

Every subcommand takes explicit input/output paths; a YAML config file is the
single source of truth for feature/model/report options and flags override
it.  Artifacts are written atomically and embed the fingerprint of the
resolved configuration.  See docs/cli.md.
"""

from __future__ import annotations

import hashlib
import io
import json
import sys
from datetime import date

import click
import yaml

from . import analytics, annotation, corpus as corpus_mod, evaluation, segmenter
from .annotation import ActionClass, LabelSet, label_distribution
from .errors import CuralogError
from .features import FeatureConfig, default_stopwords
from .pipeline import atomic_write_text, dump_bundle, load_bundle, train_bundle


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def _config_fingerprint(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _feature_config(config: dict) -> FeatureConfig:
    features = dict(config.get("features", {}))
    if "stopwords" in features:
        features["stopwords"] = frozenset(features["stopwords"])
    else:
        features["stopwords"] = default_stopwords()
    return FeatureConfig(**features)


def _write_artifact(path: str, body: str, fingerprint: str, comment: bool = True) -> None:
    if comment:
        body = f"#config={fingerprint}\n" + body
    atomic_write_text(path, body)


def _read_corpus(path: str) -> corpus_mod.Corpus:
    with open(path, encoding="utf-8") as f:
        report = corpus_mod.ingest_tickets(f, format="jsonl", source_name=path)
    if report.errors:
        first = report.errors[0]
        raise CuralogError(f"{path}:{first.line}: {first.message}")
    return report.corpus


def _read_labels(path: str) -> LabelSet:
    with open(path, encoding="utf-8") as f:
        return annotation.read_labels_jsonl(f)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Work-log mining pipeline: ingest, deidentify, segment, label, train,
    evaluate, predict, report, serve."""


def _common(func):
    func = click.option("--config", "config_path", default=None, help="YAML config file.")(func)
    func = click.option("--seed", default=0, show_default=True, type=int)(func)
    return func


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", default="jsonl", type=click.Choice(["jsonl", "csv"]))
@click.option("--out", "out_path", required=True)
@_common
def ingest(in_path, fmt, out_path, config_path, seed):
    """Read raw tickets (JSONL or CSV) into the canonical corpus format."""
    config = _load_config(config_path)
    try:
        with open(in_path, encoding="utf-8") as f:
            report = corpus_mod.ingest_tickets(f, format=fmt, source_name=in_path)
        for err in report.errors:
            click.echo(f"record error at line {err.line}: {err.message}", err=True)
        buf = io.StringIO()
        corpus_mod.write_corpus_jsonl(report.corpus, buf)
        _write_artifact(out_path, buf.getvalue(), _config_fingerprint(config))
        click.echo(f"ingested {len(report.corpus)} tickets, {len(report.errors)} record errors")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--names", "names_path", required=True, type=click.Path(exists=True),
              help="Text file, one raw name per line.")
@click.option("--out", "out_path", required=True)
@click.option("--map", "map_path", required=True, help="Pseudonym map CSV (keep separate).")
@_common
def deidentify(in_path, names_path, out_path, map_path, config_path, seed):
    """Replace listed names with linked CURATOR-NNN pseudonyms."""
    config = _load_config(config_path)
    try:
        with open(names_path, encoding="utf-8") as f:
            names = [ln.strip() for ln in f if ln.strip()]
        c = _read_corpus(in_path)
        deid, mapping = corpus_mod.deidentify(c, names)
        buf = io.StringIO()
        corpus_mod.write_corpus_jsonl(deid, buf)
        fp = _config_fingerprint(config)
        _write_artifact(out_path, buf.getvalue(), fp)
        atomic_write_text(map_path, mapping.to_csv())
        for name in mapping.unused:
            click.echo(f"unused name: {name}", err=True)
        click.echo(f"deidentified {len(names)} names ({len(mapping.unused)} unused)")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@click.option("--date-start", default=None)
@click.option("--date-end", default=None)
@click.option("--require-worklog/--no-require-worklog", default=True, show_default=True)
@_common
def filter(in_path, out_path, date_start, date_end, require_worklog, config_path, seed):
    """Filter tickets by creation-date range and work-log presence."""
    config = _load_config(config_path)
    try:
        c = _read_corpus(in_path)
        date_range = None
        if date_start or date_end:
            date_range = (
                date.fromisoformat(date_start or "0001-01-01"),
                date.fromisoformat(date_end or "9999-12-31"),
            )
        filtered = corpus_mod.filter_corpus(c, date_range=date_range, require_worklog=require_worklog)
        buf = io.StringIO()
        corpus_mod.write_corpus_jsonl(filtered, buf)
        _write_artifact(out_path, buf.getvalue(), _config_fingerprint(config))
        click.echo(f"retained {len(filtered)} of {len(c)} tickets")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@_common
def segment(in_path, out_path, config_path, seed):
    """Split work-log descriptions into hour-apportioned fragments."""
    config = _load_config(config_path)
    try:
        c = _read_corpus(in_path)
        fragments = segmenter.segment_corpus(c)
        buf = io.StringIO()
        segmenter.write_fragments_jsonl(fragments, buf)
        _write_artifact(out_path, buf.getvalue(), _config_fingerprint(config))
        click.echo(
            f"{len(fragments)} fragments; {fragments.unattributable_hours:.2f} unattributable hours "
            f"from {len(fragments.empty_entries)} empty entries"
        )
    except CuralogError as exc:
        _fail(str(exc))


@main.command("import-labels")
@click.option("--ann", "ann_path", required=True, type=click.Path(exists=True))
@click.option("--txt", "txt_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@click.option("--annotator", default="")
@_common
def import_labels(ann_path, txt_path, out_path, annotator, config_path, seed):
    """Import BRAT standoff annotations (.ann + .txt) as a label set."""
    config = _load_config(config_path)
    try:
        with open(ann_path, encoding="utf-8") as f:
            ann_text = f.read()
        with open(txt_path, encoding="utf-8") as f:
            txt_text = f.read()
        labels, errors = annotation.import_brat(ann_text, txt_text, annotator=annotator)
        for err in errors:
            click.echo(f"line {err.line} ({err.annotation_id}): {err.message}", err=True)
        buf = io.StringIO()
        annotation.write_labels_jsonl(LabelSet(tuple(labels)), buf)
        _write_artifact(out_path, buf.getvalue(), _config_fingerprint(config))
        click.echo(f"imported {len(labels)} labels, {len(errors)} errors")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--train-out", required=True)
@click.option("--test-out", required=True)
@click.option("--fraction", default=0.2, show_default=True, type=float)
@_common
def split(labels_path, train_out, test_out, fraction, config_path, seed):
    """Stratified train/test split of a label set."""
    config = _load_config(config_path)
    try:
        labels = _read_labels(labels_path)
        train, test, warnings = annotation.stratified_split(labels, fraction, seed)
        for w in warnings:
            click.echo(f"warning: {w}", err=True)
        fp = _config_fingerprint(config)
        for path, subset in ((train_out, train), (test_out, test)):
            buf = io.StringIO()
            annotation.write_labels_jsonl(subset, buf)
            _write_artifact(path, buf.getvalue(), fp)
        click.echo(f"split {len(labels)} labels into {len(train)} train / {len(test)} test")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--model", "model_kind", required=True, type=click.Choice(["dummy", "cnb", "sgd"]))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@_common
def train(model_kind, labels_path, out_path, config_path, seed):
    """Train a classifier on labeled fragments; writes a model bundle."""
    config = _load_config(config_path)
    try:
        labels = _read_labels(labels_path)
        feature_config = _feature_config(config)
        params = dict(config.get("model", {}).get(model_kind, {}))
        if model_kind in ("dummy", "sgd"):
            params.setdefault("seed", seed)
        model, vectorizer = train_bundle(labels, model_kind, feature_config, params)
        atomic_write_text(out_path, dump_bundle(model, vectorizer))
        click.echo(f"trained {model_kind} on {len(labels)} labels -> {out_path}")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@_common
def evaluate(model_path, labels_path, out_path, config_path, seed):
    """Evaluate a trained model bundle on a labeled test set."""
    config = _load_config(config_path)
    try:
        with open(model_path, encoding="utf-8") as f:
            model, vectorizer = load_bundle(f.read())
        labels = _read_labels(labels_path)
        texts = [lf.text for lf in labels.labels]
        y_true = [lf.label for lf in labels.labels]
        X = vectorizer.transform(texts)
        if model.variant == "dummy":
            model.reset_rng()
        y_pred = model.predict(X, fingerprint=vectorizer.fingerprint())
        cm = evaluation.confusion_matrix(y_true, y_pred)
        report = evaluation.metrics(cm, model_name=model.variant)
        atomic_write_text(out_path, report.to_json())
        click.echo(f"accuracy {report.accuracy:.3f} macro-F1 {report.macro_f1:.3f}")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--fragments", "fragments_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@_common
def predict(model_path, fragments_path, out_path, config_path, seed):
    """Predict an action class for every fragment."""
    config = _load_config(config_path)
    try:
        with open(model_path, encoding="utf-8") as f:
            model, vectorizer = load_bundle(f.read())
        with open(fragments_path, encoding="utf-8") as f:
            fragments = segmenter.read_fragments_jsonl(f)
        if model.variant == "dummy":
            model.reset_rng()
        predicted = analytics.predict_corpus(model, fragments, vectorizer)
        buf = io.StringIO()
        analytics.write_predictions_jsonl(predicted, buf)
        _write_artifact(out_path, buf.getvalue(), _config_fingerprint(config))
        click.echo(f"predicted {len(predicted)} fragments")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--kind", required=True, type=click.Choice(["table4", "fig4", "fig2"]))
@click.option("--predictions", "predictions_path", default=None, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", default=None, type=click.Path(exists=True))
@click.option("--labels", "labels_path", default=None, type=click.Path(exists=True))
@click.option("--group-key", default="level", type=click.Choice(["level", "archive", "year"]))
@click.option("--out", "out_path", required=True)
@_common
def report(kind, predictions_path, corpus_path, labels_path, group_key, out_path, config_path, seed):
    """Emit aggregate reports: per-action hours/studies (table4), grouped
    proportions (fig4), or label distribution (fig2)."""
    config = _load_config(config_path)
    fp = _config_fingerprint(config)
    exclude = frozenset(
        ActionClass(v) for v in config.get("report", {}).get("exclude", ["NonCuration"])
    )
    try:
        if kind == "fig2":
            if not labels_path:
                _fail("fig2 requires --labels")
            dist = label_distribution(_read_labels(labels_path))
            lines = ["action,count,proportion"]
            lines += [f"{c.value},{n},{p:.6f}" for c, (n, p) in dist.items()]
            _write_artifact(out_path, "\n".join(lines) + "\n", fp)
        else:
            if not predictions_path or not corpus_path:
                _fail(f"{kind} requires --predictions and --corpus")
            with open(predictions_path, encoding="utf-8") as f:
                predicted = analytics.read_predictions_jsonl(f)
            c = _read_corpus(corpus_path)
            if kind == "table4":
                hours = analytics.hours_by_action(predicted, exclude)
                studies = analytics.studies_containing_action(predicted, c, exclude)
                merged = analytics.ActionReport(
                    rows=tuple(
                        analytics.ActionRow(
                            action=h.action,
                            hours=h.hours,
                            hours_percent=h.hours_percent,
                            study_count=s.study_count,
                            study_percent=s.study_percent,
                        )
                        for h, s in zip(hours.rows, studies.rows)
                    ),
                    excluded_hours=hours.excluded_hours,
                    excluded_actions=hours.excluded_actions,
                    total_hours=hours.total_hours,
                    total_studies=studies.total_studies,
                )
                _write_artifact(out_path, merged.to_csv(), fp)
            else:
                grouped = analytics.action_proportions_by(predicted, c, group_key, exclude)
                for w in grouped.warnings:
                    click.echo(f"warning: {w}", err=True)
                _write_artifact(out_path, grouped.to_csv(), fp)
        click.echo(f"wrote {kind} report -> {out_path}")
    except CuralogError as exc:
        _fail(str(exc))


@main.command()
@click.option("--fragments", "fragments_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", default=None, type=click.Path(exists=True))
@click.option("--state-dir", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--static-dir", default=None, type=click.Path(), help="Built UI bundle to serve at /.")
@_common
def serve(fragments_path, corpus_path, state_dir, host, port, static_dir, config_path, seed):
    """Launch the annotation/review HTTP service."""
    import uvicorn

    from .service import create_app

    config = _load_config(config_path)
    app = create_app(
        fragments_path=fragments_path,
        state_dir=state_dir,
        feature_config=_feature_config(config),
        corpus_path=corpus_path,
        static_dir=static_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
