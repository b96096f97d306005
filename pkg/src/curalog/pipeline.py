"""Train/predict bundle plumbing shared by the CLI and the service.

A bundle is one JSON artifact carrying the feature configuration, the fitted
vocabulary, and the trained model, so downstream commands can rebuild the
exact feature space the model was trained in.
"""

from __future__ import annotations

import io
import json
import os
import tempfile

from .annotation import LabelSet
from .errors import ModelFormatError, ValidationError
from .features import FeatureConfig, NgramVectorizer, Vocabulary
from .models import (
    ComplementNaiveBayes,
    LinearSGDClassifier,
    StratifiedDummyClassifier,
    load_model,
    save_model,
)

BUNDLE_VERSION = "curalog-bundle/1"

MODEL_FACTORIES = {
    "dummy": StratifiedDummyClassifier,
    "cnb": ComplementNaiveBayes,
    "sgd": LinearSGDClassifier,
}


def train_bundle(
    label_set: LabelSet,
    model_kind: str,
    config: FeatureConfig | None = None,
    model_params: dict | None = None,
):
    """Fit vectorizer + model on a labeled set; returns (model, vectorizer)."""
    if model_kind not in MODEL_FACTORIES:
        raise ValidationError(f"unknown model kind {model_kind!r}")
    if not label_set.labels:
        raise ValidationError("cannot train on an empty label set")
    config = config or FeatureConfig()
    vectorizer = NgramVectorizer(config)
    texts = [lf.text for lf in label_set.labels]
    y = [lf.label for lf in label_set.labels]
    X = vectorizer.fit_transform(texts)
    model = MODEL_FACTORIES[model_kind](**(model_params or {}))
    model.fit(X, y, fingerprint=vectorizer.fingerprint())
    return model, vectorizer


def dump_bundle(model, vectorizer: NgramVectorizer) -> str:
    buf = io.StringIO()
    save_model(model, buf)
    return json.dumps(
        {
            "bundle": BUNDLE_VERSION,
            "feature_config": vectorizer.config.to_dict(),
            "vocabulary": vectorizer.vocabulary_.serialize(),
            "model": json.loads(buf.getvalue()),
        },
        sort_keys=True,
    )


def load_bundle(text: str):
    try:
        payload = json.loads(text)
    except ValueError as exc:
        raise ModelFormatError(f"unreadable bundle: {exc}") from exc
    if payload.get("bundle") != BUNDLE_VERSION:
        raise ModelFormatError(
            f"unsupported bundle version {payload.get('bundle')!r} (expected {BUNDLE_VERSION!r})"
        )
    config = FeatureConfig.from_dict(payload["feature_config"])
    vectorizer = NgramVectorizer(config)
    vectorizer.vocabulary_ = Vocabulary.deserialize(payload["vocabulary"])
    model = load_model(io.StringIO(json.dumps(payload["model"])))
    return model, vectorizer


def atomic_write_text(path: str, text: str) -> None:
    """Write via temp file + rename so readers never see a partial artifact."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-curalog-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
