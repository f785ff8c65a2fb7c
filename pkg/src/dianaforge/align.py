"""Monotone dialogue-to-narrative alignment by skip-limited dynamic time warping.

Dialogue session j is assigned a narrative segment a(j) such that the
assignment never moves backwards and advances by at most K+1 rows per
step (skipping at most K narrative segments), with at most K narrative
segments skipped before the first dialogue. The returned assignment
maximizes the summed similarity; score ties resolve to the
lexicographically smallest assignment, matching the brute-force oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .textsim import SimilarityMatrix

NEG_INF = float("-inf")
DEFAULT_K = 3
TRAILING_MODES = ("unbounded", "bounded")


class InfeasibleAlignment(ValueError):
    """No assignment satisfies the skip constraints."""


class EmptyGold(ValueError):
    """Evaluation was given an empty gold alignment."""


@dataclass
class AlignmentResult:
    """Total assignment of dialogue index (1..n) to narrative index (1..m), plus its score."""

    assignment: dict[int, int]
    score: float


@dataclass
class GoldAlignment:
    """Partial reference assignment of dialogue index to narrative index."""

    assignment: dict[int, int]


def _check_args(sim: SimilarityMatrix, k_max: int, trailing: str) -> tuple[int, int]:
    m, n = sim.shape
    if m < 1 or n < 1:
        raise ValueError("similarity matrix must be at least 1x1")
    if k_max < 0:
        raise ValueError("skip budget must be non-negative")
    if trailing not in TRAILING_MODES:
        raise ValueError(f"trailing must be one of {TRAILING_MODES}")
    return m, n


def align(
    sim: SimilarityMatrix, k_max: int = DEFAULT_K, trailing: str = "unbounded"
) -> AlignmentResult:
    """Globally optimal monotone assignment under the skip budget.

    With trailing="unbounded" (the default) any number of narrative
    segments may remain unused after the last dialogue; "bounded" limits
    the trailing skip to K as well.
    """
    m, n = _check_args(sim, k_max, trailing)
    scores = sim.values
    # suffix[i][j]: best total over columns j..n-1 when dialogue j sits on
    # narrative i. jump[i][j]: smallest row advance into column j+1 on an
    # optimal continuation, so the forward walk is lexicographically minimal.
    suffix = [[NEG_INF] * n for _ in range(m)]
    jump = [[0] * n for _ in range(m)]
    for i in range(m):
        if trailing == "unbounded" or i >= m - 1 - k_max:
            suffix[i][n - 1] = scores[i][n - 1]
    for j in range(n - 2, -1, -1):
        for i in range(m):
            best = NEG_INF
            best_k = 0
            for k in range(k_max + 2):
                if i + k >= m:
                    break
                value = suffix[i + k][j + 1]
                if value > best:
                    best = value
                    best_k = k
            if best > NEG_INF:
                suffix[i][j] = scores[i][j] + best
                jump[i][j] = best_k
    start = -1
    best_score = NEG_INF
    for i in range(min(k_max + 1, m)):
        if suffix[i][0] > best_score:
            best_score = suffix[i][0]
            start = i
    if start < 0:
        raise InfeasibleAlignment(f"no feasible path for shape {m}x{n} with K={k_max}")
    assignment: dict[int, int] = {}
    i = start
    for j in range(n):
        assignment[j + 1] = i + 1
        if j < n - 1:
            i += jump[i][j]
    return AlignmentResult(assignment=assignment, score=best_score)


def brute_force_align(
    sim: SimilarityMatrix, k_max: int = DEFAULT_K, trailing: str = "unbounded"
) -> AlignmentResult:
    """Exhaustive reference for align, feasible only for small matrices.

    Enumerates every monotone assignment with first row at most K+1 and
    per-step advances of at most K+1, in lexicographic order, keeping the
    first maximum encountered.
    """
    m, n = _check_args(sim, k_max, trailing)
    scores = sim.values
    best: tuple[float, tuple[int, ...]] | None = None

    def extend(path: list[int], total: float) -> None:
        nonlocal best
        j = len(path)
        if j == n:
            if trailing == "bounded" and path[-1] < m - 1 - k_max:
                return
            if best is None or total > best[0]:
                best = (total, tuple(path))
            return
        lo = path[-1] if path else 0
        hi = min(m - 1, path[-1] + k_max + 1) if path else min(m - 1, k_max)
        for i in range(lo, hi + 1):
            path.append(i)
            extend(path, total + scores[i][j])
            path.pop()

    extend([], 0.0)
    if best is None:
        raise InfeasibleAlignment(f"no feasible path for shape {m}x{n} with K={k_max}")
    total, path = best
    return AlignmentResult(
        assignment={j + 1: i + 1 for j, i in enumerate(path)}, score=total
    )


def accuracy(pred: AlignmentResult, gold: GoldAlignment) -> float:
    """Fraction of gold-labeled dialogues assigned to their gold narrative."""
    if not gold.assignment:
        raise EmptyGold("gold alignment has no labels")
    hits = sum(
        1 for j, i in gold.assignment.items() if pred.assignment.get(j) == i
    )
    return hits / len(gold.assignment)


def adjacency_error_rate(pred: AlignmentResult, gold: GoldAlignment) -> float:
    """Among misaligned dialogues, the fraction landing on a neighboring segment.

    Returns 0.0 when there are no errors.
    """
    errors = [
        (j, i) for j, i in gold.assignment.items() if pred.assignment.get(j) != i
    ]
    if not errors:
        return 0.0
    adjacent = sum(
        1
        for j, i in errors
        if j in pred.assignment and abs(pred.assignment[j] - i) == 1
    )
    return adjacent / len(errors)


def gold_from_json(text: str) -> GoldAlignment:
    """Load a gold alignment from a JSON object of string dialogue index to narrative index."""
    obj = json.loads(text)
    return GoldAlignment(assignment={int(j): int(i) for j, i in obj.items()})


def alignment_to_json(result: AlignmentResult, k_max: int, measure: str) -> str:
    """Dump one title's alignment with its configuration."""
    return json.dumps(
        {
            "assignment": {str(j): i for j, i in sorted(result.assignment.items())},
            "score": result.score,
            "K": k_max,
            "measure": measure,
        }
    )
