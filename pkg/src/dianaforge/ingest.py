"""Subtitle and synopsis ingestion: SRT parsing, title linkage, sentence splitting."""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class MalformedTimestamp(ValueError):
    """An SRT time line is missing or cannot be parsed."""

    def __init__(self, cue_index: int, line_number: int, line: str) -> None:
        super().__init__(f"cue {cue_index}, line {line_number}: bad time line {line!r}")
        self.cue_index = cue_index
        self.line_number = line_number


class EmptyFile(ValueError):
    """An SRT file yielded no usable cues."""


@dataclass
class SubtitleCue:
    """One timed subtitle block with markup already stripped."""

    index: int
    start_ms: int
    end_ms: int
    text: str


@dataclass
class SynopsisDoc:
    title: str
    year: int
    text: str


@dataclass
class NarrativeSegment:
    """One synopsis sentence, the narrative-side alignment unit."""

    id: int
    text: str


@dataclass
class TitleMeta:
    """Linkage key for one title: normalized title, year, and role names."""

    title: str
    year: int
    role_names: set[str] = field(default_factory=set)


_TIMESTAMP = r"(\d{1,2}):(\d{2}):(\d{2})[,.](\d{3})"
_TIME_LINE = re.compile(rf"^\s*{_TIMESTAMP}\s*-->\s*{_TIMESTAMP}")
_INDEX_LINE = re.compile(r"^\d+$")
_MARKUP = re.compile(r"<[^>]+>")
_BRACKETED = re.compile(r"\[[^\]]*\]|\([^)]*\)")

_ARTICLES = ("the", "a", "an")

_ABBREVIATIONS = {"mr", "mrs", "ms", "dr", "st", "jr", "sr", "vs", "etc", "e.g", "i.e"}
_TERMINATORS = ".!?"


def _to_ms(h: str, m: str, s: str, ms: str) -> int:
    return ((int(h) * 60 + int(m)) * 60 + int(s)) * 1000 + int(ms)


def _clean_cue_text(lines: list[str]) -> str:
    joined = " ".join(line.strip() for line in lines)
    joined = _MARKUP.sub("", joined)
    joined = _BRACKETED.sub(" ", joined)
    return " ".join(joined.split())


def _parse_block(block: list[tuple[int, str]], fallback_index: int) -> SubtitleCue | None:
    lines = block
    index = fallback_index
    if _INDEX_LINE.match(lines[0][1].strip()):
        index = int(lines[0][1])
        lines = lines[1:]
    if not lines:
        raise MalformedTimestamp(index, block[0][0] + 1, "<missing>")
    time_no, time_line = lines[0]
    match = _TIME_LINE.match(time_line)
    if not match:
        raise MalformedTimestamp(index, time_no, time_line)
    start_ms = _to_ms(*match.groups()[:4])
    end_ms = _to_ms(*match.groups()[4:])
    if end_ms < start_ms:
        raise MalformedTimestamp(index, time_no, time_line)
    text = _clean_cue_text([line for _, line in lines[1:]])
    if not text:
        return None
    return SubtitleCue(index=index, start_ms=start_ms, end_ms=end_ms, text=text)


def parse_srt(raw_text: str) -> list[SubtitleCue]:
    """Parse one SRT document into cues sorted by start time.

    HTML-like markup and bracketed annotations (stage directions, sound
    cues) are stripped; cues left empty by the stripping are dropped.
    A leading byte-order mark is tolerated.

    Raises:
        MalformedTimestamp: a cue's time line is missing or unparseable.
        EmptyFile: no cue survived parsing.
    """
    text = raw_text.lstrip("﻿")
    cues: list[SubtitleCue] = []
    block: list[tuple[int, str]] = []
    for line_no, line in enumerate(text.splitlines() + [""], start=1):
        if line.strip():
            block.append((line_no, line))
            continue
        if block:
            cue = _parse_block(block, fallback_index=len(cues) + 1)
            if cue is not None:
                cues.append(cue)
            block = []
    if not cues:
        raise EmptyFile("no cues parsed")
    cues.sort(key=lambda cue: cue.start_ms)
    return cues


def _format_timestamp(ms: int) -> str:
    hours, rest = divmod(ms, 3_600_000)
    minutes, rest = divmod(rest, 60_000)
    seconds, millis = divmod(rest, 1000)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d},{millis:03d}"


def format_srt(cues: list[SubtitleCue]) -> str:
    """Serialize cues back to SRT text; parse_srt round-trips this exactly."""
    blocks = [
        f"{cue.index}\n{_format_timestamp(cue.start_ms)} --> {_format_timestamp(cue.end_ms)}\n{cue.text}\n"
        for cue in cues
    ]
    return "\n".join(blocks)


def normalize_title(raw: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace, drop a leading article."""
    text = re.sub(r"[^\w\s]", "", raw.lower())
    words = text.split()
    if words and words[0] in _ARTICLES:
        words = words[1:]
    return " ".join(words)


def role_name_overlap(a: set[str], b: set[str]) -> float:
    """Overlap rate of two role-name sets: |a & b| / min(|a|, |b|); 0 if either is empty."""
    if not a or not b:
        return 0.0
    return len(a & b) / min(len(a), len(b))


def link(sub: TitleMeta, syn: TitleMeta, threshold: float = 0.5) -> bool:
    """Decide whether a subtitle and a synopsis describe the same title.

    Requires equal normalized titles, equal years, and a role-name
    overlap rate strictly above ``threshold``.
    """
    if sub.title != syn.title or sub.year != syn.year:
        return False
    return role_name_overlap(sub.role_names, syn.role_names) > threshold


def _preceding_word(text: str, i: int) -> str:
    k = i
    while k > 0 and not text[k - 1].isspace():
        k -= 1
    word = text[k:i].lower()
    while word and not word[0].isalnum():
        word = word[1:]
    return word


def _is_boundary(text: str, i: int) -> bool:
    if text[i] == "." and _preceding_word(text, i) in _ABBREVIATIONS:
        return False
    rest = text[i + 1 :]
    if not rest.strip():
        return True
    if not rest[0].isspace():
        return False
    return rest.lstrip()[0].isupper()


def split_sentences(doc: SynopsisDoc) -> list[NarrativeSegment]:
    """Split a synopsis into sentence segments numbered from 1.

    A sentence ends at '.', '!' or '?' followed by whitespace and an
    uppercase letter, or at end of text. A fixed abbreviation list
    suppresses false boundaries after e.g. "Dr." or "Mrs.".
    """
    text = doc.text
    pieces: list[str] = []
    start = 0
    for i, ch in enumerate(text):
        if ch in _TERMINATORS and _is_boundary(text, i):
            piece = text[start : i + 1].strip()
            if piece:
                pieces.append(piece)
            start = i + 1
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)
    return [NarrativeSegment(id=k, text=piece) for k, piece in enumerate(pieces, start=1)]
