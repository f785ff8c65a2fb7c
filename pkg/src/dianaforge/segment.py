"""Cue-to-utterance conversion and time-gap dialogue segmentation."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ingest import SubtitleCue

DEFAULT_DELTA_T_MS = 5000

_DASH_PREFIX = re.compile(r"^[-—]\s+")
# A dash marker after whitespace starts a new turn when the next character is
# not lowercase; this also recovers turns merged into one line by parse_srt.
_DASH_SPLIT = re.compile(r"\s+(?=[-—]\s+[^\sa-z])")
_SPEAKER_TAG = re.compile(r"^([A-Z][A-Z0-9 .'\-]{0,40}):\s*(\S.*)$")


@dataclass
class Utterance:
    text: str
    start_ms: int
    end_ms: int
    speaker: str | None = None


@dataclass
class DialogueSession:
    """A maximal run of utterances whose inter-utterance gaps stay small."""

    id: int
    utterances: list[Utterance]


def _turn_texts(cue_text: str) -> list[str]:
    turns: list[str] = []
    for raw in cue_text.split("\n"):
        line = raw.strip()
        if not line:
            continue
        for part in _DASH_SPLIT.split(line):
            dashed = bool(_DASH_PREFIX.match(part))
            stripped = _DASH_PREFIX.sub("", part, count=1).strip()
            if not stripped:
                continue
            if dashed or not turns:
                turns.append(stripped)
            else:
                turns[-1] = turns[-1] + " " + stripped
    return turns


def cues_to_utterances(cues: list[SubtitleCue]) -> list[Utterance]:
    """Expand cues into utterances.

    Dash-prefixed turns within one cue become separate utterances sharing
    the cue's time span. An all-caps "NAME: text" prefix is folded into the
    speaker field.
    """
    utterances: list[Utterance] = []
    for cue in cues:
        for turn in _turn_texts(cue.text):
            speaker = None
            match = _SPEAKER_TAG.match(turn)
            if match:
                speaker = match.group(1).strip().lower()
                turn = match.group(2).strip()
            if turn:
                utterances.append(Utterance(turn, cue.start_ms, cue.end_ms, speaker))
    return utterances


def split_sessions(
    utts: list[Utterance], delta_t_ms: int = DEFAULT_DELTA_T_MS
) -> list[DialogueSession]:
    """Partition utterances into sessions at silences longer than delta_t_ms.

    A new session starts whenever the gap between the end of one utterance
    and the start of the next exceeds the threshold. Sessions are numbered
    from 1 in temporal order.
    """
    sessions: list[DialogueSession] = []
    current: list[Utterance] = []
    for utt in utts:
        if current and utt.start_ms - current[-1].end_ms > delta_t_ms:
            sessions.append(DialogueSession(len(sessions) + 1, current))
            current = []
        current.append(utt)
    if current:
        sessions.append(DialogueSession(len(sessions) + 1, current))
    return sessions


def session_text(session: DialogueSession) -> str:
    """Plain concatenation of a session's utterance texts, for similarity scoring."""
    return " ".join(utt.text for utt in session.utterances)
