"""Per-narrative candidate pools and greedy dialogue selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .align import AlignmentResult
from .corpus import render_dialogue
from .ingest import NarrativeSegment
from .segment import DialogueSession
from .textsim import rouge1_f, tokenize


@dataclass
class CandidatePool:
    """Dialogue-session ids competing for one narrative, in temporal order."""

    narrative_id: int
    candidates: list[int]


@dataclass
class SelectedPair:
    """Greedy selection outcome for one narrative; ids keep temporal order."""

    narrative_id: int
    selected: list[int]
    rouge_f: float


def invert_alignment(res: AlignmentResult) -> dict[int, list[int]]:
    """Group dialogue ids by their assigned narrative; only non-empty groups appear."""
    inv: dict[int, list[int]] = {}
    for j in sorted(res.assignment):
        inv.setdefault(res.assignment[j], []).append(j)
    return inv


def merge_neighbors(inv: Mapping[int, Sequence[int]], m: int) -> list[CandidatePool]:
    """Widen each narrative's dialogue pool with its neighbors' dialogues.

    Most alignment errors land one segment away, so narrative i also
    receives the dialogues aligned to i-1 and i+1. Empty pools are dropped.
    """
    pools: list[CandidatePool] = []
    for i in range(1, m + 1):
        merged = sorted({*inv.get(i - 1, ()), *inv.get(i, ()), *inv.get(i + 1, ())})
        if merged:
            pools.append(CandidatePool(narrative_id=i, candidates=merged))
    return pools


def greedy_select(
    narrative: NarrativeSegment,
    pool: CandidatePool,
    sessions: Mapping[int, DialogueSession],
) -> SelectedPair:
    """Incrementally add the candidate that most improves unigram F against the narrative.

    Each round scores every unselected candidate joined with the current
    selection in temporal order; the best one is added only if it strictly
    improves the score (ties prefer the smallest dialogue id). The loop
    stops at the first non-improving round, so the selection may stay empty.
    """
    ref = tokenize(narrative.text)
    selected: list[int] = []
    best_score = 0.0
    remaining = list(pool.candidates)
    while remaining:
        round_id = None
        round_score = best_score
        for cand in remaining:
            trial = sorted(selected + [cand])
            text = render_dialogue([sessions[c] for c in trial])
            score = rouge1_f(tokenize(text), ref)
            if score > round_score:
                round_score = score
                round_id = cand
        if round_id is None:
            break
        selected.append(round_id)
        remaining.remove(round_id)
        best_score = round_score
    return SelectedPair(
        narrative_id=pool.narrative_id, selected=sorted(selected), rouge_f=best_score
    )
