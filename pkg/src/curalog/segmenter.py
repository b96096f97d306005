"""Delimiter-based segmentation of work-log descriptions into fragments.

Split points are newlines/carriage returns and periods followed by whitespace
(or end of text), so decimals like "1.5" survive.  Each entry's logged hours
are apportioned equally across its fragments.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .corpus import Corpus

__all__ = ["Fragment", "FragmentSet", "segment_entry", "segment_corpus"]

# Break at any newline/CR, or at a period when followed by whitespace or EOT.
_DELIMITER = re.compile(r"[\r\n]|\.(?=\s|$)")


@dataclass(frozen=True)
class Fragment:
    fragment_id: str
    ticket_id: str
    study_id: str
    entry_index: int
    span: tuple[int, int]
    text: str
    apportioned_hours: float


@dataclass(frozen=True)
class FragmentSet:
    fragments: tuple[Fragment, ...]
    unattributable_hours: float
    empty_entries: tuple[tuple[str, int], ...]  # (ticket_id, entry_index)

    def __len__(self) -> int:
        return len(self.fragments)

    def total_hours(self) -> float:
        return sum(f.apportioned_hours for f in self.fragments)


def segment_entry(description: str) -> list[tuple[tuple[int, int], str]]:
    """Split one description into (span, text) pieces, delimiters excluded,
    whitespace trimmed, empty pieces dropped, order preserved."""
    pieces: list[tuple[tuple[int, int], str]] = []
    pos = 0
    for match in _DELIMITER.finditer(description):
        pieces.append(((pos, match.start()), description[pos : match.start()]))
        pos = match.end()
    pieces.append(((pos, len(description)), description[pos:]))

    result: list[tuple[tuple[int, int], str]] = []
    for (start, end), raw in pieces:
        stripped = raw.strip()
        if not stripped:
            continue
        lead = len(raw) - len(raw.lstrip())
        result.append(((start + lead, start + lead + len(stripped)), stripped))
    return result


def segment_corpus(corpus: Corpus) -> FragmentSet:
    """Segment every work-log entry in the corpus.

    Fragment ids are deterministic (ticket_id:entry_index:ordinal).  Entries
    with no usable text contribute no fragments; their hours land in the
    unattributable bucket.
    """
    fragments: list[Fragment] = []
    unattributable = 0.0
    empty_entries: list[tuple[str, int]] = []
    for ticket in corpus.tickets:
        for entry_index, entry in enumerate(ticket.work_logs):
            pieces = segment_entry(entry.description)
            if not pieces:
                unattributable += entry.time_spent_hours
                empty_entries.append((ticket.ticket_id, entry_index))
                continue
            share = entry.time_spent_hours / len(pieces)
            for ordinal, (span, text) in enumerate(pieces):
                fragments.append(
                    Fragment(
                        fragment_id=f"{ticket.ticket_id}:{entry_index}:{ordinal}",
                        ticket_id=ticket.ticket_id,
                        study_id=ticket.study_id,
                        entry_index=entry_index,
                        span=span,
                        text=text,
                        apportioned_hours=share,
                    )
                )
    return FragmentSet(
        fragments=tuple(fragments),
        unattributable_hours=unattributable,
        empty_entries=tuple(empty_entries),
    )


def fragment_to_dict(f: Fragment) -> dict:
    return {
        "fragment_id": f.fragment_id,
        "ticket_id": f.ticket_id,
        "study_id": f.study_id,
        "entry_index": f.entry_index,
        "span": list(f.span),
        "text": f.text,
        "apportioned_hours": f.apportioned_hours,
    }


def fragment_from_dict(d: dict) -> Fragment:
    return Fragment(
        fragment_id=d["fragment_id"],
        ticket_id=d["ticket_id"],
        study_id=d["study_id"],
        entry_index=d["entry_index"],
        span=(d["span"][0], d["span"][1]),
        text=d["text"],
        apportioned_hours=d["apportioned_hours"],
    )


def write_fragments_jsonl(fragments: FragmentSet, stream) -> None:
    for f in fragments.fragments:
        stream.write(json.dumps(fragment_to_dict(f), sort_keys=True) + "\n")


def read_fragments_jsonl(stream) -> FragmentSet:
    frags = [fragment_from_dict(json.loads(line)) for line in stream if line.strip() and not line.startswith("#")]
    return FragmentSet(fragments=tuple(frags), unattributable_hours=0.0, empty_entries=())
