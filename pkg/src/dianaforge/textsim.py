"""Tokenization and the similarity measures between narrative segments and dialogues.

Four measures are supported: token-set Jaccard, unigram ROUGE F, TF-IDF
cosine, and TF-IDF cosine with a per-narrative L2 row normalization that
penalizes narrative sentences similar to many dialogues at once.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .ingest import NarrativeSegment
from .segment import DialogueSession, session_text

TokenSeq = list[str]
TfIdfVector = dict[str, float]

MEASURES = ("jaccard", "rouge1f", "tfidf", "tfidf_normalized")

_TOKEN = re.compile(r"[^\W_]+")


class EmptyCollection(ValueError):
    """A similarity computation was given an empty document collection."""


def tokenize(text: str) -> TokenSeq:
    """Lowercase and split on any non-alphanumeric character. No stemming, no stopwords."""
    return _TOKEN.findall(text.lower())


def jaccard(a: TokenSeq, b: TokenSeq) -> float:
    """Set Jaccard similarity of the two token vocabularies; 0 when both are empty."""
    set_a, set_b = set(a), set(b)
    if not set_a and not set_b:
        return 0.0
    return len(set_a & set_b) / len(set_a | set_b)


def rouge1_f(cand: TokenSeq, ref: TokenSeq) -> float:
    """Unigram F score with clipped counts.

    The overlap counts each term at most min(count in cand, count in ref)
    times; precision and recall divide by the full candidate and reference
    lengths.
    """
    if not cand or not ref:
        return 0.0
    cand_counts = Counter(cand)
    ref_counts = Counter(ref)
    overlap = sum(min(count, ref_counts[term]) for term, count in cand_counts.items())
    if overlap == 0:
        return 0.0
    precision = overlap / len(cand)
    recall = overlap / len(ref)
    return 2 * precision * recall / (precision + recall)


class IdfTable(dict):
    """Term to IDF weight mapping; unseen terms get the df=0 smoothing value."""

    def __init__(self, weights: dict[str, float], unseen: float) -> None:
        super().__init__(weights)
        self.unseen = unseen

    def __missing__(self, term: str) -> float:
        return self.unseen


def build_idf(docs: Sequence[TokenSeq]) -> IdfTable:
    """Smoothed inverse document frequency: idf(t) = ln((1 + N) / (1 + df(t))) + 1."""
    if not docs:
        raise EmptyCollection("idf needs at least one document")
    n_docs = len(docs)
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc))
    weights = {term: math.log((1 + n_docs) / (1 + count)) + 1.0 for term, count in df.items()}
    return IdfTable(weights, unseen=math.log(1 + n_docs) + 1.0)


def tfidf_vector(doc: TokenSeq, idf: Mapping[str, float]) -> TfIdfVector:
    """Sparse raw-count TF-IDF vector; absent terms are not stored."""
    return {term: count * idf[term] for term, count in Counter(doc).items()}


def cosine(u: TfIdfVector, v: TfIdfVector) -> float:
    """Cosine similarity of two sparse non-negative vectors; 0 if either is empty."""
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(weight * v[term] for term, weight in u.items() if term in v)
    if dot == 0.0:
        return 0.0
    norm_u = math.sqrt(sum(w * w for w in u.values()))
    norm_v = math.sqrt(sum(w * w for w in v.values()))
    return min(1.0, dot / (norm_u * norm_v))


@dataclass
class SimilarityMatrix:
    """Narrative-by-dialogue similarity values under one measure."""

    values: list[list[float]]
    measure: str

    @property
    def shape(self) -> tuple[int, int]:
        rows = len(self.values)
        return rows, len(self.values[0]) if rows else 0


def _l2_normalize_row(row: list[float]) -> list[float]:
    norm = math.sqrt(sum(value * value for value in row))
    if norm == 0.0:
        return list(row)
    return [value / norm for value in row]


def similarity_matrix(
    segments: Sequence[NarrativeSegment],
    sessions: Sequence[DialogueSession],
    measure: str = "tfidf_normalized",
) -> SimilarityMatrix:
    """Score every (narrative segment, dialogue session) pair of one title.

    For the TF-IDF measures the IDF collection is the union of this title's
    segments and sessions, each treated as one document. The normalized
    variant rescales each narrative's row of the cosine matrix to unit L2
    norm (all-zero rows are left unchanged).
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}, expected one of {MEASURES}")
    if not segments or not sessions:
        raise EmptyCollection("similarity needs at least one segment and one session")
    seg_tokens = [tokenize(seg.text) for seg in segments]
    ses_tokens = [tokenize(session_text(ses)) for ses in sessions]
    if measure == "jaccard":
        values = [[jaccard(seg, ses) for ses in ses_tokens] for seg in seg_tokens]
    elif measure == "rouge1f":
        values = [[rouge1_f(ses, seg) for ses in ses_tokens] for seg in seg_tokens]
    else:
        idf = build_idf(seg_tokens + ses_tokens)
        seg_vecs = [tfidf_vector(tokens, idf) for tokens in seg_tokens]
        ses_vecs = [tfidf_vector(tokens, idf) for tokens in ses_tokens]
        values = [[cosine(seg, ses) for ses in ses_vecs] for seg in seg_vecs]
        if measure == "tfidf_normalized":
            values = [_l2_normalize_row(row) for row in values]
    return SimilarityMatrix(values=values, measure=measure)


def matrix_to_json(matrix: SimilarityMatrix) -> str:
    """Debug dump: measure, shape, and row-major values."""
    rows, cols = matrix.shape
    return json.dumps(
        {
            "measure": matrix.measure,
            "rows": rows,
            "cols": cols,
            "values": [value for row in matrix.values for value in row],
        }
    )


def matrix_from_json(text: str) -> SimilarityMatrix:
    obj = json.loads(text)
    rows, cols = obj["rows"], obj["cols"]
    flat = obj["values"]
    if len(flat) != rows * cols:
        raise ValueError("matrix dump has inconsistent shape")
    values = [list(flat[r * cols : (r + 1) * cols]) for r in range(rows)]
    return SimilarityMatrix(values=values, measure=obj["measure"])
