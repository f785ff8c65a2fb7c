"""JSONL serialization of (dialogue, narrative) pairs and corpus statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .segment import DialogueSession
from .textsim import tokenize

TOKENIZER_LABEL = "lowercase-alphanumeric"

_FLOAT_DIGITS = 6


class IoFailure(OSError):
    """Writing the corpus stream failed."""


class ParseFailure(ValueError):
    """A corpus line is not valid JSON."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line


class InvariantViolation(ValueError):
    """A corpus record is well-formed JSON but violates the record contract."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line


class EmptyCorpus(ValueError):
    """Statistics were requested for an empty corpus."""


@dataclass
class PairRecord:
    """One (dialogue, narrative) corpus entry with quality scores and provenance."""

    title_id: str
    narrative_id: int
    dialogue: str
    narrative: str
    dialogue_ids: list[int]
    coverage: float
    density: float
    align_score: float


@dataclass
class CorpusStats:
    pair_count: int
    avg_dialogue_tokens: float
    avg_narrative_tokens: float
    coverage_mean: float
    density_mean: float


def render_dialogue(sessions: Sequence[DialogueSession]) -> str:
    """Canonical dialogue text: utterances joined by newlines, speaker prefixes kept."""
    lines: list[str] = []
    for session in sessions:
        for utt in session.utterances:
            lines.append(f"{utt.speaker}: {utt.text}" if utt.speaker else utt.text)
    return "\n".join(lines)


def write_jsonl(pairs: Iterable[PairRecord], sink: IO[str]) -> int:
    """Write one JSON object per pair with a fixed field order; returns the line count.

    Floats are rounded to six fractional digits so reruns are byte-identical.
    """
    count = 0
    try:
        for pair in pairs:
            row = {
                "title_id": pair.title_id,
                "narrative_id": pair.narrative_id,
                "dialogue": pair.dialogue,
                "narrative": pair.narrative,
                "dialogue_ids": list(pair.dialogue_ids),
                "coverage": round(pair.coverage, _FLOAT_DIGITS),
                "density": round(pair.density, _FLOAT_DIGITS),
                "align_score": round(pair.align_score, _FLOAT_DIGITS),
            }
            sink.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    except OSError as exc:
        raise IoFailure(f"corpus write failed: {exc}") from exc
    return count


def _as_record(obj: object, line: int) -> PairRecord:
    if not isinstance(obj, dict):
        raise InvariantViolation(line, "record is not a JSON object")
    try:
        record = PairRecord(
            title_id=obj["title_id"],
            narrative_id=obj["narrative_id"],
            dialogue=obj["dialogue"],
            narrative=obj["narrative"],
            dialogue_ids=list(obj["dialogue_ids"]),
            coverage=float(obj["coverage"]),
            density=float(obj["density"]),
            align_score=float(obj["align_score"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvariantViolation(line, f"bad or missing field: {exc}") from exc
    if not isinstance(record.title_id, str) or not isinstance(record.narrative_id, int):
        raise InvariantViolation(line, "title_id must be a string and narrative_id an integer")
    if not record.dialogue or not record.narrative:
        raise InvariantViolation(line, "dialogue and narrative must be non-empty")
    ids = record.dialogue_ids
    if not all(isinstance(i, int) for i in ids):
        raise InvariantViolation(line, "dialogue_ids must be integers")
    if any(b <= a for a, b in zip(ids, ids[1:])):
        raise InvariantViolation(line, "dialogue_ids must be strictly increasing")
    return record


def read_jsonl(source: Iterable[str]) -> list[PairRecord]:
    """Read pair records in file order, rejecting bad lines with their line number."""
    records: list[PairRecord] = []
    for line_no, line in enumerate(source, start=1):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseFailure(line_no, str(exc)) from exc
        records.append(_as_record(obj, line_no))
    return records


def stats(pairs: Sequence[PairRecord]) -> CorpusStats:
    """Means over the corpus, with token counts from the shared tokenizer."""
    if not pairs:
        raise EmptyCorpus("no pairs to summarize")
    n = len(pairs)
    return CorpusStats(
        pair_count=n,
        avg_dialogue_tokens=sum(len(tokenize(p.dialogue)) for p in pairs) / n,
        avg_narrative_tokens=sum(len(tokenize(p.narrative)) for p in pairs) / n,
        coverage_mean=sum(p.coverage for p in pairs) / n,
        density_mean=sum(p.density for p in pairs) / n,
    )
