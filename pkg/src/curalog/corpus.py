"""Ticket corpus ingestion, deidentification, filtering, and summary statistics.

A corpus is a list of curation-request tickets, each carrying ordered
hours-bearing work-log entries.  Values are immutable after construction;
filters and deidentification return new corpora.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field, replace
from datetime import date

from .errors import DuplicateTicketError, IngestError, ValidationError

__all__ = [
    "WorkLogEntry",
    "Ticket",
    "Corpus",
    "IngestReport",
    "RecordError",
    "PseudonymMap",
    "CorpusSummary",
    "SummaryRow",
    "ingest_tickets",
    "deidentify",
    "filter_corpus",
    "corpus_summary",
    "write_corpus_jsonl",
]

_LEVELS = (1, 2, 3)


@dataclass(frozen=True)
class WorkLogEntry:
    author: str
    logged_date: date
    time_spent_hours: float
    description: str

    def __post_init__(self):
        if self.time_spent_hours < 0:
            raise ValidationError(
                f"time_spent_hours must be non-negative, got {self.time_spent_hours}"
            )


@dataclass(frozen=True)
class Ticket:
    ticket_id: str
    study_id: str
    curation_level: int
    archive: str
    created_date: date
    work_logs: tuple[WorkLogEntry, ...]

    def __post_init__(self):
        if self.curation_level not in _LEVELS:
            raise ValidationError(
                f"curation_level must be 1, 2 or 3, got {self.curation_level}"
            )

    @property
    def total_hours(self) -> float:
        return sum(e.time_spent_hours for e in self.work_logs)


@dataclass(frozen=True)
class Corpus:
    tickets: tuple[Ticket, ...]
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        seen: dict[str, int] = {}
        for i, t in enumerate(self.tickets):
            if t.ticket_id in seen:
                raise DuplicateTicketError(t.ticket_id, seen[t.ticket_id], i)
            seen[t.ticket_id] = i

    def __len__(self) -> int:
        return len(self.tickets)

    def study_ids(self) -> set[str]:
        return {t.study_id for t in self.tickets}


@dataclass(frozen=True)
class RecordError:
    line: int
    message: str


@dataclass(frozen=True)
class IngestReport:
    corpus: Corpus
    errors: tuple[RecordError, ...]


def _parse_date(value, line: int, field_name: str) -> date:
    try:
        return date.fromisoformat(str(value))
    except ValueError as exc:
        raise ValueError(f"{field_name}: {exc}") from exc


def _parse_level(value) -> int:
    if isinstance(value, str) and value.upper().startswith("L"):
        value = value[1:]
    try:
        level = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"curation_level {value!r} is not an integer")
    if level not in _LEVELS:
        raise ValueError(f"curation_level {level} out of range (must be 1-3)")
    return level


def _entry_from_dict(raw: dict, line: int) -> WorkLogEntry:
    hours = float(raw.get("time_spent_hours", 0))
    if hours < 0:
        raise ValueError(f"time_spent_hours {hours} is negative")
    return WorkLogEntry(
        author=str(raw.get("author", "")),
        logged_date=_parse_date(raw.get("logged_date"), line, "logged_date"),
        time_spent_hours=hours,
        description=str(raw.get("description", "")),
    )


def _ticket_from_dict(raw: dict, line: int) -> Ticket:
    for required in ("ticket_id", "curation_level", "work_logs"):
        if required not in raw:
            raise ValueError(f"missing required field {required!r}")
    entries = tuple(_entry_from_dict(e, line) for e in raw["work_logs"])
    return Ticket(
        ticket_id=str(raw["ticket_id"]),
        study_id=str(raw.get("study_id", raw["ticket_id"])),
        curation_level=_parse_level(raw["curation_level"]),
        archive=str(raw.get("archive", "")),
        created_date=_parse_date(raw.get("created_date"), line, "created_date"),
        work_logs=entries,
    )


CSV_HEADER = [
    "ticket_id",
    "study_id",
    "curation_level",
    "archive",
    "created_date",
    "author",
    "logged_date",
    "time_spent_hours",
    "description",
]


def ingest_tickets(source, format: str = "jsonl", source_name: str = "<stream>") -> IngestReport:
    """Read a ticket corpus from a JSONL or CSV byte/text stream.

    Malformed records are collected into the report's error list; duplicate
    ticket ids and unreadable streams are fatal.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    elif hasattr(source, "read") and isinstance(source.read(0), bytes):
        source = io.TextIOWrapper(source, encoding="utf-8")

    if format == "jsonl":
        tickets, errors = _ingest_jsonl(source)
    elif format == "csv":
        tickets, errors = _ingest_csv(source)
    else:
        raise IngestError(f"unknown format {format!r} (expected jsonl or csv)")

    seen: dict[str, int] = {}
    for t, line in tickets:
        if t.ticket_id in seen:
            raise DuplicateTicketError(t.ticket_id, seen[t.ticket_id], line)
        seen[t.ticket_id] = line

    corpus = Corpus(
        tickets=tuple(t for t, _ in tickets),
        provenance=(f"ingested from {source_name} ({format})",),
    )
    return IngestReport(corpus=corpus, errors=tuple(errors))


def _ingest_jsonl(stream) -> tuple[list[tuple[Ticket, int]], list[RecordError]]:
    tickets: list[tuple[Ticket, int]] = []
    errors: list[RecordError] = []
    try:
        lines = list(stream)
    except OSError as exc:
        raise IngestError(f"unreadable stream: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            raw = json.loads(line)
            tickets.append((_ticket_from_dict(raw, lineno), lineno))
        except DuplicateTicketError:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            errors.append(RecordError(line=lineno, message=str(exc)))
    return tickets, errors


def _ingest_csv(stream) -> tuple[list[tuple[Ticket, int]], list[RecordError]]:
    # One work-log entry per row; rows regrouped by ticket_id in first-seen order.
    reader = csv.DictReader(stream)
    grouped: dict[str, dict] = {}
    order: list[str] = []
    first_line: dict[str, int] = {}
    errors: list[RecordError] = []
    for lineno, row in enumerate(reader, start=2):
        try:
            tid = row["ticket_id"]
            if not tid:
                raise ValueError("missing required field 'ticket_id'")
            entry = {
                "author": row.get("author", ""),
                "logged_date": row.get("logged_date", ""),
                "time_spent_hours": row.get("time_spent_hours", 0),
                "description": row.get("description", ""),
            }
            if tid not in grouped:
                grouped[tid] = {
                    "ticket_id": tid,
                    "study_id": row.get("study_id", tid),
                    "curation_level": row.get("curation_level"),
                    "archive": row.get("archive", ""),
                    "created_date": row.get("created_date", ""),
                    "work_logs": [],
                }
                order.append(tid)
                first_line[tid] = lineno
            grouped[tid]["work_logs"].append(entry)
        except (ValueError, KeyError) as exc:
            errors.append(RecordError(line=lineno, message=str(exc)))
    tickets: list[tuple[Ticket, int]] = []
    for tid in order:
        lineno = first_line[tid]
        try:
            tickets.append((_ticket_from_dict(grouped[tid], lineno), lineno))
        except (ValueError, TypeError) as exc:
            errors.append(RecordError(line=lineno, message=str(exc)))
    return tickets, errors


@dataclass(frozen=True)
class PseudonymMap:
    """Injective raw-name -> CURATOR-NNN mapping, ordered by first appearance."""

    assignments: tuple[tuple[str, str], ...]
    unused: tuple[str, ...] = ()

    def pseudonym_for(self, name: str) -> str:
        for raw, pseudo in self.assignments:
            if raw.lower() == name.lower():
                return pseudo
        raise KeyError(name)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["raw_name", "pseudonym"])
        for raw, pseudo in self.assignments:
            writer.writerow([raw, pseudo])
        return out.getvalue()


def _word_pattern(name: str) -> re.Pattern:
    return re.compile(r"(?<!\w)" + re.escape(name) + r"(?!\w)", re.IGNORECASE)


def deidentify(corpus: Corpus, names: list[str]) -> tuple[Corpus, PseudonymMap]:
    """Replace whole-word, case-insensitive occurrences of each name with a
    linked pseudonym.  Longer names match first so substrings never clip a
    longer name.  Names never found are reported in the map's unused list.
    """
    if not names:
        raise ValidationError("names must be non-empty")
    ordered = sorted(names, key=len, reverse=True)
    patterns = {n: _word_pattern(n) for n in ordered}

    # Assignment order follows first appearance in corpus iteration order.
    appearance: list[str] = []
    found: set[str] = set()
    for ticket in corpus.tickets:
        for entry in ticket.work_logs:
            for name in ordered:
                if name in found:
                    continue
                if patterns[name].search(entry.author) or patterns[name].search(
                    entry.description
                ):
                    appearance.append(name)
                    found.add(name)

    unused = [n for n in names if n not in found]
    all_in_order = appearance + unused
    pseudonyms = {n: f"CURATOR-{i + 1:03d}" for i, n in enumerate(all_in_order)}

    def scrub(text: str) -> str:
        for name in ordered:
            text = patterns[name].sub(pseudonyms[name], text)
        return text

    new_tickets = tuple(
        replace(
            ticket,
            work_logs=tuple(
                replace(e, author=scrub(e.author), description=scrub(e.description))
                for e in ticket.work_logs
            ),
        )
        for ticket in corpus.tickets
    )
    mapping = PseudonymMap(
        assignments=tuple((n, pseudonyms[n]) for n in all_in_order),
        unused=tuple(unused),
    )
    new_corpus = Corpus(
        tickets=new_tickets,
        provenance=corpus.provenance + (f"deidentified {len(names)} names",),
    )
    return new_corpus, mapping


def filter_corpus(
    corpus: Corpus,
    date_range: tuple[date, date] | None = None,
    require_worklog: bool = False,
) -> Corpus:
    """Keep tickets inside the (inclusive) creation-date range and, if asked,
    only tickets carrying at least one work-log entry."""
    if date_range is not None:
        start, end = date_range
        if start > end:
            raise ValidationError(f"inverted date range: {start} > {end}")
    retained = []
    for t in corpus.tickets:
        if date_range is not None and not (date_range[0] <= t.created_date <= date_range[1]):
            continue
        if require_worklog and not t.work_logs:
            continue
        retained.append(t)
    removed = len(corpus.tickets) - len(retained)
    trail = (
        f"filtered: date_range={date_range}, require_worklog={require_worklog}, "
        f"removed={removed}"
    )
    return Corpus(tickets=tuple(retained), provenance=corpus.provenance + (trail,))


@dataclass(frozen=True)
class SummaryRow:
    dimension: str  # "level" | "archive" | "year"
    group: str
    ticket_count: int
    study_count: int
    avg_hours_per_study: float


@dataclass(frozen=True)
class CorpusSummary:
    rows: tuple[SummaryRow, ...]

    def by_dimension(self, dimension: str) -> list[SummaryRow]:
        return [r for r in self.rows if r.dimension == dimension]


def normalize_archive(tag: str, allow_list: tuple[str, ...] = ("BJS", "ICPSR")) -> str:
    tag = tag.strip().upper()
    return tag if tag in allow_list else "Other"


def corpus_summary(
    corpus: Corpus,
    archive_allow_list: tuple[str, ...] = ("BJS", "ICPSR"),
    hours_decimals: int = 1,
) -> CorpusSummary:
    """Ticket counts, distinct-study counts, and average hours per study,
    grouped independently by curation level, archive, and creation year."""
    if not corpus.tickets:
        raise ValidationError("nothing to summarize: corpus is empty")

    def key_funcs(t: Ticket) -> dict[str, str]:
        return {
            "level": f"Level {t.curation_level}",
            "archive": normalize_archive(t.archive, archive_allow_list),
            "year": str(t.created_date.year),
        }

    rows: list[SummaryRow] = []
    for dimension in ("level", "archive", "year"):
        groups: dict[str, list[Ticket]] = {}
        for t in corpus.tickets:
            groups.setdefault(key_funcs(t)[dimension], []).append(t)
        for group in sorted(groups):
            tickets = groups[group]
            studies = {t.study_id for t in tickets}
            total_hours = sum(t.total_hours for t in tickets)
            rows.append(
                SummaryRow(
                    dimension=dimension,
                    group=group,
                    ticket_count=len(tickets),
                    study_count=len(studies),
                    avg_hours_per_study=round(total_hours / len(studies), hours_decimals),
                )
            )
    return CorpusSummary(rows=tuple(rows))


def ticket_to_dict(t: Ticket) -> dict:
    return {
        "ticket_id": t.ticket_id,
        "study_id": t.study_id,
        "curation_level": t.curation_level,
        "archive": t.archive,
        "created_date": t.created_date.isoformat(),
        "work_logs": [
            {
                "author": e.author,
                "logged_date": e.logged_date.isoformat(),
                "time_spent_hours": e.time_spent_hours,
                "description": e.description,
            }
            for e in t.work_logs
        ],
    }


def write_corpus_jsonl(corpus: Corpus, stream) -> None:
    for t in corpus.tickets:
        stream.write(json.dumps(ticket_to_dict(t), sort_keys=True) + "\n")
