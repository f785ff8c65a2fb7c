"""Extractive-fragment coverage and density scoring, and threshold filtering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import PairRecord
from .textsim import TokenSeq

DEFAULT_COV_MIN = 0.5
DEFAULT_DEN_MIN = 1.0


class ZeroLengthSummary(ValueError):
    """Coverage or density was requested for an empty summary."""


@dataclass
class Fragment:
    """A maximal shared token span: summary[summary_start:+length] equals article[article_start:+length]."""

    summary_start: int
    article_start: int
    length: int


@dataclass
class QualityScores:
    coverage: float
    density: float


def _match_length(article: TokenSeq, q: int, summary: TokenSeq, p: int) -> int:
    length = 0
    while (
        p + length < len(summary)
        and q + length < len(article)
        and summary[p + length] == article[q + length]
    ):
        length += 1
    return length


def extractive_fragments(article: TokenSeq, summary: TokenSeq) -> list[Fragment]:
    """Greedy left-to-right extraction of shared token spans.

    At each summary position the longest match anywhere in the article is
    taken (smallest article start among equally long matches) and the
    position advances past it, so fragments never overlap in the summary.
    """
    positions: dict[str, list[int]] = {}
    for q, token in enumerate(article):
        positions.setdefault(token, []).append(q)
    fragments: list[Fragment] = []
    p = 0
    while p < len(summary):
        best_len = 0
        best_q = -1
        for q in positions.get(summary[p], ()):
            length = _match_length(article, q, summary, p)
            if length > best_len:
                best_len = length
                best_q = q
        if best_len >= 1:
            fragments.append(Fragment(summary_start=p, article_start=best_q, length=best_len))
            p += best_len
        else:
            p += 1
    return fragments


def coverage(frags: Sequence[Fragment], summary_len: int) -> float:
    """Fraction of summary tokens lying inside shared fragments."""
    if summary_len < 1:
        raise ZeroLengthSummary("summary has no tokens")
    return sum(f.length for f in frags) / summary_len


def density(frags: Sequence[Fragment], summary_len: int) -> float:
    """Mean squared fragment length per summary token; high values mean long copied spans."""
    if summary_len < 1:
        raise ZeroLengthSummary("summary has no tokens")
    return sum(f.length * f.length for f in frags) / summary_len


def score(article: TokenSeq, summary: TokenSeq) -> QualityScores:
    """Coverage and density of a summary against an article, from scratch."""
    frags = extractive_fragments(article, summary)
    return QualityScores(
        coverage=coverage(frags, len(summary)),
        density=density(frags, len(summary)),
    )


def filter_pairs(
    pairs: Sequence[PairRecord],
    cov_min: float = DEFAULT_COV_MIN,
    den_min: float = DEFAULT_DEN_MIN,
) -> list[PairRecord]:
    """Keep pairs with coverage and density strictly above both thresholds, in order."""
    return [p for p in pairs if p.coverage > cov_min and p.density > den_min]
