"""The 8-class action schema, human labels, BRAT standoff import/export,
and stratified train/test splitting."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum

from .errors import ValidationError

__all__ = [
    "ActionClass",
    "LabeledFragment",
    "LabelSet",
    "BratError",
    "import_brat",
    "export_brat",
    "label_distribution",
    "stratified_split",
]


class ActionClass(str, Enum):
    """Closed schema of curatorial actions; every label is one of these."""

    InitialReviewAndPlanning = "InitialReviewAndPlanning"
    DataTransformation = "DataTransformation"
    Metadata = "Metadata"
    Documentation = "Documentation"
    QualityChecks = "QualityChecks"
    Communication = "Communication"
    Other = "Other"
    NonCuration = "NonCuration"


# BRAT label spellings -> schema classes.  Unknown labels are errors, never
# silently mapped to Other.
DEFAULT_ALIASES: dict[str, ActionClass] = {
    **{c.value: c for c in ActionClass},
    "Initial_Review_And_Planning": ActionClass.InitialReviewAndPlanning,
    "InitialReview": ActionClass.InitialReviewAndPlanning,
    "Data_Transformation": ActionClass.DataTransformation,
    "Quality_Checks": ActionClass.QualityChecks,
    "Non_Curation": ActionClass.NonCuration,
}


@dataclass(frozen=True)
class LabeledFragment:
    text: str
    label: ActionClass
    annotator: str = ""
    source: str = "fixture"  # brat_import | ui | fixture
    timestamp: str | None = None
    fragment_id: str | None = None
    span: tuple[int, int] | None = None


@dataclass(frozen=True)
class LabelSet:
    labels: tuple[LabeledFragment, ...]

    def __len__(self) -> int:
        return len(self.labels)

    def distribution(self) -> dict[ActionClass, int]:
        counts = {c: 0 for c in ActionClass}
        for lf in self.labels:
            counts[lf.label] += 1
        return counts


@dataclass(frozen=True)
class BratError:
    line: int
    annotation_id: str
    message: str


def import_brat(
    ann_text: str,
    txt_text: str,
    aliases: dict[str, ActionClass] | None = None,
    annotator: str = "",
) -> tuple[list[LabeledFragment], list[BratError]]:
    """Parse BRAT text-bound (T) standoff lines against the source document.

    Surface text is verified against the document offsets; mismatches,
    unknown labels, and discontinuous spans become per-line errors.
    """
    aliases = aliases if aliases is not None else DEFAULT_ALIASES
    fragments: list[LabeledFragment] = []
    errors: list[BratError] = []
    for lineno, line in enumerate(ann_text.splitlines(), start=1):
        if not line.strip() or not line.startswith("T"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            errors.append(BratError(lineno, parts[0], "malformed text-bound line"))
            continue
        ann_id, type_span, surface = parts
        if ";" in type_span:
            errors.append(
                BratError(lineno, ann_id, f"discontinuous spans are not supported at {ann_id}")
            )
            continue
        pieces = type_span.rsplit(" ", 2)
        if len(pieces) != 3:
            errors.append(BratError(lineno, ann_id, "malformed type/offset field"))
            continue
        raw_label, start_s, end_s = pieces
        try:
            start, end = int(start_s), int(end_s)
        except ValueError:
            errors.append(BratError(lineno, ann_id, "non-integer offsets"))
            continue
        if raw_label not in aliases:
            errors.append(BratError(lineno, ann_id, f"unknown label {raw_label!r}"))
            continue
        if txt_text[start:end] != surface:
            errors.append(BratError(lineno, ann_id, f"span text mismatch at {ann_id}"))
            continue
        fragments.append(
            LabeledFragment(
                text=surface,
                label=aliases[raw_label],
                annotator=annotator,
                source="brat_import",
                fragment_id=ann_id,
                span=(start, end),
            )
        )
    return fragments, errors


def export_brat(labels: list[LabeledFragment]) -> tuple[str, str]:
    """Write a LabelSet back to standoff form: one T line per fragment, the
    document being the fragments joined by newlines.  Round-trips bit-exact
    through import_brat."""
    doc_parts: list[str] = []
    ann_lines: list[str] = []
    offset = 0
    for i, lf in enumerate(labels, start=1):
        start = offset
        end = start + len(lf.text)
        doc_parts.append(lf.text)
        ann_lines.append(f"T{i}\t{lf.label.value} {start} {end}\t{lf.text}")
        offset = end + 1  # joining newline
    return "\n".join(ann_lines) + ("\n" if ann_lines else ""), "\n".join(doc_parts)


def label_distribution(label_set: LabelSet) -> dict[ActionClass, tuple[int, float]]:
    """(count, proportion) per class, zero classes included; proportions sum
    to 1 for non-empty sets."""
    counts = label_set.distribution()
    total = len(label_set)
    return {
        c: (n, (n / total) if total else 0.0) for c, n in counts.items()
    }


def stratified_split(
    label_set: LabelSet, test_fraction: float = 0.2, seed: int = 0
) -> tuple[LabelSet, LabelSet, list[str]]:
    """Per-class random split: each class with n >= 2 members sends
    round(test_fraction * n) members (at least 1, at most n-1) to test.
    Singleton classes go to train with a warning.  Returns (train, test,
    warnings)."""
    if not label_set.labels:
        raise ValidationError("cannot split an empty label set")
    rng = random.Random(seed)
    by_class: dict[ActionClass, list[LabeledFragment]] = {}
    for lf in label_set.labels:
        by_class.setdefault(lf.label, []).append(lf)

    train: list[LabeledFragment] = []
    test: list[LabeledFragment] = []
    warnings: list[str] = []
    for cls in ActionClass:  # fixed order keeps the split seed-deterministic
        members = by_class.get(cls)
        if not members:
            continue
        n = len(members)
        if n == 1:
            train.extend(members)
            warnings.append(f"class {cls.value} has a single member; kept in train")
            continue
        n_test = min(max(round(test_fraction * n), 1), n - 1)
        shuffled = members[:]
        rng.shuffle(shuffled)
        test.extend(shuffled[:n_test])
        train.extend(shuffled[n_test:])
    return LabelSet(tuple(train)), LabelSet(tuple(test)), warnings


def labeled_fragment_to_dict(lf: LabeledFragment) -> dict:
    d = {
        "text": lf.text,
        "label": lf.label.value,
        "annotator": lf.annotator,
        "source": lf.source,
    }
    if lf.timestamp is not None:
        d["timestamp"] = lf.timestamp
    if lf.fragment_id is not None:
        d["fragment_id"] = lf.fragment_id
    if lf.span is not None:
        d["span"] = list(lf.span)
    return d


def labeled_fragment_from_dict(d: dict) -> LabeledFragment:
    return LabeledFragment(
        text=d["text"],
        label=ActionClass(d["label"]),
        annotator=d.get("annotator", ""),
        source=d.get("source", "fixture"),
        timestamp=d.get("timestamp"),
        fragment_id=d.get("fragment_id"),
        span=tuple(d["span"]) if d.get("span") else None,
    )


def write_labels_jsonl(label_set: LabelSet, stream) -> None:
    for lf in label_set.labels:
        stream.write(json.dumps(labeled_fragment_to_dict(lf), sort_keys=True) + "\n")


def read_labels_jsonl(stream) -> LabelSet:
    labels = [labeled_fragment_from_dict(json.loads(ln)) for ln in stream if ln.strip() and not ln.startswith("#")]
    return LabelSet(tuple(labels))
