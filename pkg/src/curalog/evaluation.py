"""Confusion matrices and accuracy / precision / recall / F1 reporting,
plus a side-by-side model comparison table."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .annotation import ActionClass
from .errors import ValidationError

__all__ = [
    "ConfusionMatrix",
    "ClassMetrics",
    "MetricsReport",
    "confusion_matrix",
    "metrics",
    "compare_models",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[ActionClass, ...]
    matrix: tuple[tuple[int, ...], ...]  # matrix[true][pred]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.matrix)

    def support(self, cls: ActionClass) -> int:
        return sum(self.matrix[self.classes.index(cls)])

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["true\\pred"] + [c.value for c in self.classes])
        for c, row in zip(self.classes, self.matrix):
            writer.writerow([c.value] + list(row))
        return out.getvalue()


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    undefined_precision: bool = False  # 0/0 resolved to 0
    undefined_recall: bool = False


@dataclass(frozen=True)
class MetricsReport:
    model_name: str
    accuracy: float
    per_class: dict[ActionClass, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    test_fingerprint: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": self.model_name,
                "accuracy": self.accuracy,
                "per_class": {
                    c.value: {
                        "precision": m.precision,
                        "recall": m.recall,
                        "f1": m.f1,
                        "support": m.support,
                    }
                    for c, m in self.per_class.items()
                },
                "macro": {
                    "precision": self.macro_precision,
                    "recall": self.macro_recall,
                    "f1": self.macro_f1,
                },
                "weighted": {
                    "precision": self.weighted_precision,
                    "recall": self.weighted_recall,
                    "f1": self.weighted_f1,
                },
            },
            sort_keys=True,
        )


def confusion_matrix(
    y_true: list[ActionClass],
    y_pred: list[ActionClass],
    classes: list[ActionClass] | None = None,
) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise ValidationError(
            f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted"
        )
    if not y_true:
        raise ValidationError("cannot build a confusion matrix from zero instances")
    if classes is None:
        present = set(y_true) | set(y_pred)
        classes = [c for c in ActionClass if c in present]
    index = {c: i for i, c in enumerate(classes)}
    for label in list(y_true) + list(y_pred):
        if label not in index:
            raise ValidationError(f"label {label!r} not in class list")
    m = [[0] * len(classes) for _ in classes]
    for t, p in zip(y_true, y_pred):
        m[index[t]][index[p]] += 1
    return ConfusionMatrix(classes=tuple(classes), matrix=tuple(tuple(r) for r in m))


def metrics(cm: ConfusionMatrix, model_name: str = "", test_fingerprint: str = "") -> MetricsReport:
    total = cm.total
    if total == 0:
        raise ValidationError("empty confusion matrix")
    n = len(cm.classes)
    correct = sum(cm.matrix[i][i] for i in range(n))
    accuracy = correct / total

    per_class: dict[ActionClass, ClassMetrics] = {}
    for i, cls in enumerate(cm.classes):
        tp = cm.matrix[i][i]
        col = sum(cm.matrix[r][i] for r in range(n))
        row = sum(cm.matrix[i])
        undef_p = col == 0
        undef_r = row == 0
        precision = tp / col if col else 0.0
        recall = tp / row if row else 0.0
        f1 = (2 * precision * recall / (precision + recall)) if (precision + recall) else 0.0
        per_class[cls] = ClassMetrics(
            precision=precision,
            recall=recall,
            f1=f1,
            support=row,
            undefined_precision=undef_p,
            undefined_recall=undef_r,
        )

    def macro(attr: str) -> float:
        return sum(getattr(m, attr) for m in per_class.values()) / n

    def weighted(attr: str) -> float:
        return sum(getattr(m, attr) * m.support for m in per_class.values()) / total

    return MetricsReport(
        model_name=model_name,
        accuracy=accuracy,
        per_class=per_class,
        macro_precision=macro("precision"),
        macro_recall=macro("recall"),
        macro_f1=macro("f1"),
        weighted_precision=weighted("precision"),
        weighted_recall=weighted("recall"),
        weighted_f1=weighted("f1"),
        test_fingerprint=test_fingerprint,
    )


def compare_models(reports: list[MetricsReport], averaging: str = "weighted") -> str:
    """Aligned plain-text comparison table, best value per column marked *."""
    if not reports:
        raise ValidationError("need at least one report to compare")
    fingerprints = {r.test_fingerprint for r in reports}
    if len(fingerprints) > 1:
        raise ValidationError(f"reports evaluated on different test sets: {fingerprints}")
    if averaging not in ("weighted", "macro"):
        raise ValidationError(f"unknown averaging {averaging!r}")

    def cols(r: MetricsReport) -> list[float]:
        prefix = averaging
        return [
            r.accuracy,
            getattr(r, f"{prefix}_f1"),
            getattr(r, f"{prefix}_precision"),
            getattr(r, f"{prefix}_recall"),
        ]

    values = [cols(r) for r in reports]
    best = [max(col) for col in zip(*values)]
    header = f"{'Classifier':<20} {'Accuracy':>10} {'F1':>10} {'Precision':>10} {'Recall':>10}"
    lines = [header, "-" * len(header)]
    for r, vals in zip(reports, values):
        cells = " ".join(
            f"{v:>9.2f}{'*' if v == b else ' '}" for v, b in zip(vals, best)
        )
        lines.append(f"{r.model_name:<20} {cells}")
    return "\n".join(lines)
