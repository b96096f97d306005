"""HTTP service for the annotate -> train -> review loop.

State is an append-only JSONL event log (labels, reviews) replayed at
startup; every acknowledged mutation is flushed to disk first.  Label-set
mutations funnel through one writer lock and training jobs run serialized on
a background thread.  Routes are documented in docs/api.md.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from . import analytics, evaluation
from .annotation import ActionClass, LabelSet, LabeledFragment, label_distribution, stratified_split
from .corpus import ingest_tickets
from .errors import CuralogError
from .features import FeatureConfig
from .pipeline import train_bundle
from .segmenter import FragmentSet, read_fragments_jsonl

VALID_CLASSES = [c.value for c in ActionClass]


class LabelSubmission(BaseModel):
    fragment_id: str
    label: str
    annotator: str = ""


class ReviewSubmission(BaseModel):
    fragment_id: str
    decision: str  # confirm | correct
    corrected_label: str | None = None
    reviewer: str = ""


class TrainRequest(BaseModel):
    model: str = "cnb"
    test_fraction: float = 0.2
    seed: int = 0


class ServiceState:
    def __init__(self, fragments: FragmentSet, state_dir: str, feature_config: FeatureConfig,
                 corpus=None):
        self.fragments = {f.fragment_id: f for f in fragments.fragments}
        self.fragment_order = [f.fragment_id for f in fragments.fragments]
        self.fragment_set = fragments
        self.corpus = corpus
        self.feature_config = feature_config
        self.state_dir = state_dir
        os.makedirs(state_dir, exist_ok=True)
        self.log_path = os.path.join(state_dir, "events.jsonl")
        self.write_lock = threading.Lock()
        self.train_lock = threading.Lock()
        # current label per fragment (last write wins); full history stays in the log
        self.labels: dict[str, dict] = {}
        self.audit: list[dict] = []
        self.jobs: dict[str, dict] = {}
        self.latest_model = None
        self.latest_vectorizer = None
        self.latest_metrics: dict | None = None
        self.predictions: dict[str, dict] = {}
        self._replay()

    def _replay(self):
        if not os.path.exists(self.log_path):
            return
        with open(self.log_path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    self._apply(json.loads(line))

    def _apply(self, event: dict):
        self.audit.append(event)
        if event["type"] in ("label", "review"):
            self.labels[event["fragment_id"]] = event

    def append_event(self, event: dict):
        """Durably persist, then apply. Callers hold the write lock."""
        with open(self.log_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(event, sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())
        self._apply(event)

    def label_set(self) -> LabelSet:
        labels = []
        for fid, event in self.labels.items():
            frag = self.fragments.get(fid)
            labels.append(
                LabeledFragment(
                    text=frag.text if frag else event.get("text", ""),
                    label=ActionClass(event["label"]),
                    annotator=event.get("annotator", ""),
                    source="ui",
                    timestamp=event.get("timestamp"),
                    fragment_id=fid,
                )
            )
        return LabelSet(tuple(labels))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def create_app(
    fragments_path: str,
    state_dir: str,
    feature_config: FeatureConfig | None = None,
    corpus_path: str | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    with open(fragments_path, encoding="utf-8") as f:
        fragments = read_fragments_jsonl(f)
    corpus = None
    if corpus_path:
        with open(corpus_path, encoding="utf-8") as f:
            corpus = ingest_tickets(f, format="jsonl", source_name=corpus_path).corpus
    state = ServiceState(fragments, state_dir, feature_config or FeatureConfig(), corpus)
    app = FastAPI(title="curalog annotation service")
    app.state.service = state

    @app.get("/schema")
    def schema():
        return {"classes": VALID_CLASSES}

    @app.get("/fragments")
    def list_fragments(status: str = "unlabeled", page: int = 0, page_size: int = 20):
        if status == "unlabeled":
            ids = [fid for fid in state.fragment_order if fid not in state.labels]
            items = [
                {"fragment_id": fid, "text": state.fragments[fid].text}
                for fid in ids[page * page_size : (page + 1) * page_size]
            ]
            return {"total": len(ids), "page": page, "fragments": items}
        if status == "predicted":
            ids = [
                fid
                for fid in state.fragment_order
                if fid in state.predictions and fid not in state.labels
            ]
            items = [
                {
                    "fragment_id": fid,
                    "text": state.fragments[fid].text,
                    "predicted_label": state.predictions[fid]["label"],
                    "low_confidence": state.predictions[fid]["low_confidence"],
                }
                for fid in ids[page * page_size : (page + 1) * page_size]
            ]
            return {"total": len(ids), "page": page, "fragments": items}
        raise HTTPException(422, detail=f"unknown status {status!r}")

    def _check_label(value: str) -> str:
        if value not in VALID_CLASSES:
            raise HTTPException(
                422, detail={"message": f"invalid label {value!r}", "valid": VALID_CLASSES}
            )
        return value

    def _check_fragment(fid: str):
        if fid not in state.fragments:
            raise HTTPException(404, detail=f"unknown fragment_id {fid!r}")

    @app.post("/labels", status_code=201)
    def submit_label(payload: LabelSubmission):
        _check_fragment(payload.fragment_id)
        _check_label(payload.label)
        with state.write_lock:
            state.append_event(
                {
                    "type": "label",
                    "fragment_id": payload.fragment_id,
                    "label": payload.label,
                    "annotator": payload.annotator,
                    "timestamp": _now(),
                }
            )
        return {"status": "recorded", "fragment_id": payload.fragment_id}

    @app.post("/reviews", status_code=201)
    def submit_review(payload: ReviewSubmission):
        _check_fragment(payload.fragment_id)
        if payload.decision not in ("confirm", "correct"):
            raise HTTPException(422, detail="decision must be 'confirm' or 'correct'")
        if payload.decision == "correct":
            if not payload.corrected_label:
                raise HTTPException(422, detail="corrected_label required when decision=correct")
            label = _check_label(payload.corrected_label)
        else:
            pred = state.predictions.get(payload.fragment_id)
            if pred is None:
                raise HTTPException(409, detail="no prediction to confirm for this fragment")
            label = pred["label"]
        with state.write_lock:
            state.append_event(
                {
                    "type": "review",
                    "fragment_id": payload.fragment_id,
                    "decision": payload.decision,
                    "label": label,
                    "annotator": payload.reviewer,
                    "timestamp": _now(),
                }
            )
        return {"status": "recorded", "fragment_id": payload.fragment_id, "label": label}

    def _run_training(job_id: str, request: TrainRequest):
        with state.train_lock:  # one training job at a time
            state.jobs[job_id]["status"] = "running"
            try:
                labels = state.label_set()
                train, test, _warnings = stratified_split(
                    labels, request.test_fraction, request.seed
                )
                params = {"seed": request.seed} if request.model in ("dummy", "sgd") else {}
                model, vectorizer = train_bundle(
                    train, request.model, state.feature_config, params
                )
                metrics_payload = None
                if test.labels:
                    X = vectorizer.transform([lf.text for lf in test.labels])
                    if model.variant == "dummy":
                        model.reset_rng()
                    y_pred = model.predict(X, fingerprint=vectorizer.fingerprint())
                    cm = evaluation.confusion_matrix([lf.label for lf in test.labels], y_pred)
                    report = evaluation.metrics(cm, model_name=request.model)
                    metrics_payload = json.loads(report.to_json())
                predicted = analytics.predict_corpus(model, state.fragment_set, vectorizer)
                state.latest_model = model
                state.latest_vectorizer = vectorizer
                state.latest_metrics = metrics_payload
                state.predictions = {
                    p.fragment.fragment_id: {
                        "label": p.label.value,
                        "low_confidence": p.low_confidence,
                    }
                    for p in predicted
                }
                state.jobs[job_id].update(status="done", metrics=metrics_payload)
            except (CuralogError, ValueError) as exc:
                state.jobs[job_id].update(status="failed", error=str(exc))

    @app.post("/jobs/train", status_code=202)
    def start_training(request: TrainRequest):
        if request.model not in ("dummy", "cnb", "sgd"):
            raise HTTPException(422, detail=f"unknown model {request.model!r}")
        labels = state.label_set()
        classes = {lf.label for lf in labels.labels}
        if len(classes) < 2:
            raise HTTPException(
                409, detail="need labels from at least 2 classes before training"
            )
        job_id = uuid.uuid4().hex
        state.jobs[job_id] = {"id": job_id, "status": "queued", "model": request.model}
        thread = threading.Thread(target=_run_training, args=(job_id, request), daemon=True)
        thread.start()
        return {"job_id": job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, detail=f"unknown job {job_id!r}")
        return job

    @app.get("/metrics/latest")
    def latest_metrics():
        if state.latest_metrics is None:
            raise HTTPException(404, detail="no completed training job yet")
        return state.latest_metrics

    @app.get("/reports/{kind}")
    def report(kind: str, group_key: str = "level"):
        if state.latest_model is None and kind != "fig2":
            raise HTTPException(404, detail="no trained model yet")
        if kind == "fig2":
            dist = label_distribution(state.label_set())
            return {
                "rows": [
                    {"action": c.value, "count": n, "proportion": p}
                    for c, (n, p) in dist.items()
                ]
            }
        predicted = [
            analytics.PredictedFragment(
                fragment=state.fragments[fid],
                label=ActionClass(p["label"]),
                low_confidence=p["low_confidence"],
            )
            for fid, p in state.predictions.items()
        ]
        if kind == "table4":
            try:
                hours = analytics.hours_by_action(predicted)
            except CuralogError as exc:
                raise HTTPException(409, detail=str(exc))
            return json.loads(hours.to_json())
        if kind == "fig4":
            if state.corpus is None:
                raise HTTPException(409, detail="service started without a corpus; fig4 unavailable")
            grouped = analytics.action_proportions_by(predicted, state.corpus, group_key)
            return {
                "key": grouped.key,
                "groups": [
                    {
                        "group": group,
                        "proportions": {c.value: v for c, v in props},
                    }
                    for group, props in grouped.groups
                ],
            }
        raise HTTPException(404, detail=f"unknown report kind {kind!r}")

    @app.get("/audit/{fragment_id}")
    def audit(fragment_id: str):
        _check_fragment(fragment_id)
        return {"events": [e for e in state.audit if e.get("fragment_id") == fragment_id]}

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=PlainTextResponse)
        def root():
            return "curalog annotation service (no UI bundle mounted)"

    return app
