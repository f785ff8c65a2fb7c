"""Toolkit for mining (dialogue, narrative) parallel corpora from subtitles and synopses."""

from .align import (
    AlignmentResult,
    GoldAlignment,
    InfeasibleAlignment,
    accuracy,
    adjacency_error_rate,
    align,
    brute_force_align,
)
from .corpus import CorpusStats, PairRecord, read_jsonl, render_dialogue, stats, write_jsonl
from .ingest import (
    NarrativeSegment,
    SubtitleCue,
    SynopsisDoc,
    TitleMeta,
    link,
    normalize_title,
    parse_srt,
    role_name_overlap,
    split_sentences,
)
from .pipeline import PipelineConfig, build_title, link_titles, run_build, run_eval
from .quality import Fragment, QualityScores, coverage, density, extractive_fragments, filter_pairs
from .refine import CandidatePool, SelectedPair, greedy_select, invert_alignment, merge_neighbors
from .segment import DialogueSession, Utterance, cues_to_utterances, split_sessions
from .textsim import (
    SimilarityMatrix,
    build_idf,
    cosine,
    jaccard,
    rouge1_f,
    similarity_matrix,
    tfidf_vector,
    tokenize,
)

__version__ = "0.1.0"
