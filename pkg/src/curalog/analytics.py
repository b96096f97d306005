"""Aggregate reporting over predicted fragments: share of logged hours per
action, percent of studies containing each action, and per-group action
proportions by curation level, archive, or year."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .annotation import ActionClass
from .corpus import Corpus, normalize_archive
from .errors import ValidationError
from .features import NgramVectorizer
from .segmenter import Fragment, FragmentSet

__all__ = [
    "PredictedFragment",
    "ActionReport",
    "ActionRow",
    "GroupedProportions",
    "predict_corpus",
    "hours_by_action",
    "studies_containing_action",
    "action_proportions_by",
]

DEFAULT_EXCLUDE = frozenset({ActionClass.NonCuration})


@dataclass(frozen=True)
class PredictedFragment:
    fragment: Fragment
    label: ActionClass
    low_confidence: bool = False


@dataclass(frozen=True)
class ActionRow:
    action: ActionClass
    hours: float
    hours_percent: float
    study_count: int
    study_percent: float


@dataclass(frozen=True)
class ActionReport:
    rows: tuple[ActionRow, ...]
    excluded_hours: float
    excluded_actions: tuple[ActionClass, ...]
    total_hours: float
    total_studies: int

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(
            ["action", "percent_of_studies_containing_action", "percent_of_hours", "hours", "study_count"]
        )
        for r in self.rows:
            writer.writerow(
                [r.action.value, f"{r.study_percent:.1f}", f"{r.hours_percent:.1f}",
                 f"{r.hours:.4f}", r.study_count]
            )
        return out.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "rows": [
                    {
                        "action": r.action.value,
                        "hours": r.hours,
                        "hours_percent": r.hours_percent,
                        "study_count": r.study_count,
                        "study_percent": r.study_percent,
                    }
                    for r in self.rows
                ],
                "excluded_hours": self.excluded_hours,
                "excluded_actions": [a.value for a in self.excluded_actions],
                "total_hours": self.total_hours,
                "total_studies": self.total_studies,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class GroupedProportions:
    key: str  # "level" | "archive" | "year"
    groups: tuple[tuple[str, tuple[tuple[ActionClass, float], ...]], ...]
    warnings: tuple[str, ...] = ()

    def to_long_rows(self) -> list[tuple[str, str, float]]:
        return [
            (group, action.value, value)
            for group, props in self.groups
            for action, value in props
        ]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["group", "action", "proportion"])
        for group, action, value in self.to_long_rows():
            writer.writerow([group, action, f"{value:.6f}"])
        return out.getvalue()


def predict_corpus(
    model, fragments: FragmentSet, vectorizer: NgramVectorizer
) -> list[PredictedFragment]:
    """Label every fragment.  Fragments with no in-vocabulary terms get the
    model's training-majority class and a low-confidence flag."""
    texts = [f.text for f in fragments.fragments]
    if not texts:
        return []
    X = vectorizer.transform(texts)
    labels = model.predict(X, fingerprint=vectorizer.fingerprint())
    zero = set(X.zero_rows)
    out = []
    for i, (frag, label) in enumerate(zip(fragments.fragments, labels)):
        if i in zero:
            out.append(
                PredictedFragment(fragment=frag, label=model.majority_class_, low_confidence=True)
            )
        else:
            out.append(PredictedFragment(fragment=frag, label=label))
    return out


def _report_rows(
    predicted: list[PredictedFragment],
    corpus: Corpus | None,
    exclude: frozenset[ActionClass],
) -> ActionReport:
    hours: dict[ActionClass, float] = {c: 0.0 for c in ActionClass}
    studies: dict[ActionClass, set[str]] = {c: set() for c in ActionClass}
    excluded_hours = 0.0
    for pf in predicted:
        if pf.label in exclude:
            excluded_hours += pf.fragment.apportioned_hours
            continue
        hours[pf.label] += pf.fragment.apportioned_hours
        studies[pf.label].add(pf.fragment.study_id)
    total_hours = sum(hours[c] for c in ActionClass if c not in exclude)
    if corpus is not None:
        all_studies = corpus.study_ids()
    else:
        all_studies = {pf.fragment.study_id for pf in predicted}
    n_studies = len(all_studies)
    rows = []
    for c in ActionClass:
        if c in exclude:
            continue
        rows.append(
            ActionRow(
                action=c,
                hours=hours[c],
                hours_percent=(100.0 * hours[c] / total_hours) if total_hours else 0.0,
                study_count=len(studies[c]),
                study_percent=(100.0 * len(studies[c]) / n_studies) if n_studies else 0.0,
            )
        )
    return ActionReport(
        rows=tuple(rows),
        excluded_hours=excluded_hours,
        excluded_actions=tuple(sorted(exclude, key=list(ActionClass).index)),
        total_hours=total_hours,
        total_studies=n_studies,
    )


def hours_by_action(
    predicted: list[PredictedFragment],
    exclude: frozenset[ActionClass] = DEFAULT_EXCLUDE,
) -> ActionReport:
    """Percent of total (non-excluded) apportioned hours per action."""
    report = _report_rows(predicted, None, exclude)
    if report.total_hours == 0:
        raise ValidationError("zero total hours: nothing to attribute")
    return report


def studies_containing_action(
    predicted: list[PredictedFragment],
    corpus: Corpus,
    exclude: frozenset[ActionClass] = DEFAULT_EXCLUDE,
) -> ActionReport:
    """Percent of studies with at least one fragment predicted as each action."""
    if not corpus.tickets:
        raise ValidationError("empty corpus")
    return _report_rows(predicted, corpus, exclude)


def action_proportions_by(
    predicted: list[PredictedFragment],
    corpus: Corpus,
    key: str,
    exclude: frozenset[ActionClass] = DEFAULT_EXCLUDE,
    archive_allow_list: tuple[str, ...] = ("BJS", "ICPSR"),
) -> GroupedProportions:
    """Within each group, the fraction of non-excluded fragments per action."""
    if key not in ("level", "archive", "year"):
        raise ValidationError(f"unknown grouping key {key!r}")
    ticket_group: dict[str, str] = {}
    for t in corpus.tickets:
        if key == "level":
            ticket_group[t.ticket_id] = f"Level {t.curation_level}"
        elif key == "archive":
            ticket_group[t.ticket_id] = normalize_archive(t.archive, archive_allow_list)
        else:
            ticket_group[t.ticket_id] = str(t.created_date.year)

    counts: dict[str, dict[ActionClass, int]] = {}
    warnings: list[str] = []
    for pf in predicted:
        if pf.label in exclude:
            continue
        group = ticket_group.get(pf.fragment.ticket_id)
        if group is None:
            warnings.append(f"fragment {pf.fragment.fragment_id} has no ticket in corpus")
            continue
        counts.setdefault(group, {})[pf.label] = counts.setdefault(group, {}).get(pf.label, 0) + 1

    groups = []
    for group in sorted(counts):
        total = sum(counts[group].values())
        if total == 0:
            warnings.append(f"group {group} has zero fragments; omitted")
            continue
        props = tuple(
            (c, counts[group].get(c, 0) / total) for c in ActionClass if c not in exclude
        )
        groups.append((group, props))
    return GroupedProportions(key=key, groups=tuple(groups), warnings=tuple(warnings))


def write_predictions_jsonl(predicted: list[PredictedFragment], stream) -> None:
    from .segmenter import fragment_to_dict

    for pf in predicted:
        record = fragment_to_dict(pf.fragment)
        record["label"] = pf.label.value
        record["low_confidence"] = pf.low_confidence
        stream.write(json.dumps(record, sort_keys=True) + "\n")


def read_predictions_jsonl(stream) -> list[PredictedFragment]:
    from .segmenter import fragment_from_dict

    out = []
    for line in stream:
        if not line.strip() or line.startswith("#"):
            continue
        record = json.loads(line)
        label = ActionClass(record.pop("label"))
        low = record.pop("low_confidence", False)
        out.append(
            PredictedFragment(fragment=fragment_from_dict(record), label=label, low_confidence=low)
        )
    return out
