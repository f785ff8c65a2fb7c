"""End-to-end corpus construction: title linkage, per-title builds, evaluation."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

from . import quality
from .align import (
    GoldAlignment,
    AlignmentResult,
    TRAILING_MODES,
    accuracy,
    adjacency_error_rate,
    align,
    gold_from_json,
)
from .corpus import PairRecord, render_dialogue
from .ingest import (
    NarrativeSegment,
    SynopsisDoc,
    TitleMeta,
    link,
    normalize_title,
    parse_srt,
    split_sentences,
)
from .quality import filter_pairs
from .refine import greedy_select, invert_alignment, merge_neighbors
from .segment import (
    DEFAULT_DELTA_T_MS,
    DialogueSession,
    cues_to_utterances,
    split_sessions,
)
from .textsim import MEASURES, similarity_matrix, tokenize

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """The pipeline configuration is out of range or malformed."""


class MissingInput(FileNotFoundError):
    """A required input file or directory does not exist."""


class MissingGold(FileNotFoundError):
    """No gold alignment files were found for evaluation."""


@dataclass
class PipelineConfig:
    delta_t_ms: int = DEFAULT_DELTA_T_MS
    k_max: int = 3
    measure: str = "tfidf_normalized"
    cov_min: float = 0.5
    den_min: float = 1.0
    link_threshold: float = 0.5
    trailing_skip: str = "unbounded"
    workers: int = 1

    # JSON/config-file key per field; "k" is friendlier on the command line.
    _KEYS = {
        "delta_t_ms": "delta_t_ms",
        "k_max": "k",
        "measure": "measure",
        "cov_min": "cov_min",
        "den_min": "den_min",
        "link_threshold": "link_threshold",
        "trailing_skip": "trailing_skip",
        "workers": "workers",
    }

    def validate(self) -> None:
        if self.delta_t_ms <= 0:
            raise ConfigError("delta_t_ms must be positive")
        if self.k_max < 0:
            raise ConfigError("k must be non-negative")
        if self.measure not in MEASURES:
            raise ConfigError(f"measure must be one of {MEASURES}")
        if not 0.0 <= self.link_threshold <= 1.0:
            raise ConfigError("link_threshold must be in [0, 1]")
        if self.den_min < 0.0:
            raise ConfigError("den_min must be non-negative")
        if self.trailing_skip not in TRAILING_MODES:
            raise ConfigError(f"trailing_skip must be one of {TRAILING_MODES}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @classmethod
    def load(cls, path: Path | None = None, overrides: dict | None = None) -> "PipelineConfig":
        """Defaults, then JSON config file values, then explicit overrides."""
        values: dict = {}
        if path is not None:
            try:
                raw = json.loads(Path(path).read_text(encoding="utf-8"))
            except FileNotFoundError as exc:
                raise ConfigError(f"config file not found: {path}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
            if not isinstance(raw, dict):
                raise ConfigError("config file must hold a JSON object")
            by_key = {key: name for name, key in cls._KEYS.items()}
            for key, value in raw.items():
                name = by_key.get(key)
                if name is None:
                    raise ConfigError(f"unknown config key {key!r}")
                values[name] = value
        for name, value in (overrides or {}).items():
            if value is not None:
                values[name] = value
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        config = cls(**values)
        config.validate()
        return config


@dataclass
class TitleEntry:
    """One sidecar record; a record may carry a subtitle, a synopsis, or both."""

    id: str
    title: str
    year: int
    roles: set[str]
    subtitle_path: Path | None = None
    synopsis_path: Path | None = None

    @property
    def meta(self) -> TitleMeta:
        return TitleMeta(normalize_title(self.title), self.year, self.roles)


def _normalize_roles(roles: Sequence[str]) -> set[str]:
    return {" ".join(r.lower().split()) for r in roles if r and r.strip()}


def _entry_from_obj(obj: dict, base_dir: Path, source: str) -> TitleEntry:
    try:
        entry = TitleEntry(
            id=str(obj["id"]),
            title=str(obj["title"]),
            year=int(obj["year"]),
            roles=_normalize_roles(obj.get("roles", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MissingInput(f"bad sidecar record in {source}: {exc}") from exc
    for attr in ("subtitle_path", "synopsis_path"):
        value = obj.get(attr)
        if value:
            path = Path(value)
            setattr(entry, attr, path if path.is_absolute() else base_dir / path)
    return entry


def load_sidecars(metadata_dir: Path) -> list[TitleEntry]:
    """Read every *.json sidecar in the directory; relative paths resolve against it."""
    metadata_dir = Path(metadata_dir)
    if not metadata_dir.is_dir():
        raise MissingInput(f"metadata directory not found: {metadata_dir}")
    entries: list[TitleEntry] = []
    for path in sorted(metadata_dir.glob("*.json")):
        raw = json.loads(path.read_text(encoding="utf-8"))
        objs = raw if isinstance(raw, list) else [raw]
        for obj in objs:
            entries.append(_entry_from_obj(obj, metadata_dir, str(path)))
    return entries


def link_titles(entries: Sequence[TitleEntry], threshold: float = 0.5) -> dict:
    """Pair subtitle-side records with synopsis-side records.

    Records carrying both paths match themselves. When several synopses
    pass for one subtitle, the smallest synopsis id wins and a warning is
    logged. Unmatched records on either side are reported with a reason.
    """
    subs = sorted((e for e in entries if e.subtitle_path), key=lambda e: e.id)
    syns = sorted((e for e in entries if e.synopsis_path), key=lambda e: e.id)
    pairs: list[dict] = []
    skipped: list[dict] = []
    matched_syn_ids: set[str] = set()
    for sub in subs:
        candidates = [s for s in syns if link(sub.meta, s.meta, threshold)]
        if not candidates:
            same_key = [s for s in syns if s.meta.title == sub.meta.title and s.year == sub.year]
            reason = (
                "role-name overlap at or below threshold"
                if same_key
                else "no synopsis with matching title and year"
            )
            skipped.append({"id": sub.id, "side": "subtitle", "reason": reason})
            continue
        if len(candidates) > 1:
            logger.warning(
                "title %r (%d): %d synopsis candidates, keeping first by id (%s)",
                sub.title,
                sub.year,
                len(candidates),
                candidates[0].id,
            )
        syn = candidates[0]
        matched_syn_ids.add(syn.id)
        pairs.append(
            {
                "id": sub.id,
                "title": sub.title,
                "year": sub.year,
                "subtitle_path": str(sub.subtitle_path),
                "synopsis_path": str(syn.synopsis_path),
            }
        )
    for syn in syns:
        if syn.id not in matched_syn_ids and not syn.subtitle_path:
            skipped.append({"id": syn.id, "side": "synopsis", "reason": "no subtitle matched"})
    return {"pairs": pairs, "skipped": skipped}


def load_manifest(path: Path) -> list[dict]:
    """Read a manifest produced by link_titles; relative paths resolve against it."""
    path = Path(path)
    if not path.is_file():
        raise MissingInput(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MissingInput(f"manifest is not valid JSON: {exc}") from exc
    entries = raw.get("pairs", raw) if isinstance(raw, dict) else raw
    if not isinstance(entries, list):
        raise MissingInput("manifest must hold a list of pairs")
    base = path.parent
    resolved = []
    for entry in entries:
        entry = dict(entry)
        for key in ("subtitle_path", "synopsis_path"):
            p = Path(entry[key])
            entry[key] = str(p if p.is_absolute() else base / p)
        resolved.append(entry)
    return resolved


@dataclass
class TitleArtifacts:
    """Intermediate products of one title's pipeline run."""

    segments: list[NarrativeSegment]
    sessions: list[DialogueSession]
    alignment: AlignmentResult


def prepare_title(entry: dict, config: PipelineConfig) -> tuple[list[NarrativeSegment], list[DialogueSession]]:
    """Parse and segment one title's subtitle and synopsis files."""
    subtitle_path = Path(entry["subtitle_path"])
    synopsis_path = Path(entry["synopsis_path"])
    for p in (subtitle_path, synopsis_path):
        if not p.is_file():
            raise MissingInput(f"input file not found: {p}")
    cues = parse_srt(subtitle_path.read_text(encoding="utf-8"))
    sessions = split_sessions(cues_to_utterances(cues), config.delta_t_ms)
    doc = SynopsisDoc(
        title=entry.get("title", ""),
        year=int(entry.get("year", 0)),
        text=synopsis_path.read_text(encoding="utf-8"),
    )
    segments = split_sentences(doc)
    return segments, sessions


def align_title(entry: dict, config: PipelineConfig) -> TitleArtifacts:
    segments, sessions = prepare_title(entry, config)
    sim = similarity_matrix(segments, sessions, config.measure)
    result = align(sim, config.k_max, config.trailing_skip)
    return TitleArtifacts(segments=segments, sessions=sessions, alignment=result)


def build_title(entry: dict, config: PipelineConfig) -> list[PairRecord]:
    """Run one title end to end and return its filtered pair records."""
    artifacts = align_title(entry, config)
    inv = invert_alignment(artifacts.alignment)
    pools = merge_neighbors(inv, len(artifacts.segments))
    sessions_by_id = {s.id: s for s in artifacts.sessions}
    segments_by_id = {s.id: s for s in artifacts.segments}
    pairs: list[PairRecord] = []
    for pool in pools:
        segment = segments_by_id[pool.narrative_id]
        chosen = greedy_select(segment, pool, sessions_by_id)
        if not chosen.selected:
            continue
        dialogue = render_dialogue([sessions_by_id[c] for c in chosen.selected])
        article = tokenize(dialogue)
        summary = tokenize(segment.text)
        if not article or not summary:
            continue
        scores = quality.score(article, summary)
        pairs.append(
            PairRecord(
                title_id=entry["id"],
                narrative_id=segment.id,
                dialogue=dialogue,
                narrative=segment.text,
                dialogue_ids=list(chosen.selected),
                coverage=scores.coverage,
                density=scores.density,
                align_score=artifacts.alignment.score,
            )
        )
    return filter_pairs(pairs, config.cov_min, config.den_min)


def run_build(entries: Sequence[dict], config: PipelineConfig) -> tuple[list[PairRecord], list[dict]]:
    """Build every manifest title with a worker pool; output keeps manifest order.

    Per-title failures are logged and reported, never fatal here.
    """

    def safe(entry: dict) -> tuple[list[PairRecord], str | None]:
        try:
            return build_title(entry, config), None
        except Exception as exc:  # noqa: BLE001 - per-title isolation is the contract
            return [], f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(safe, entries))
    pairs: list[PairRecord] = []
    failures: list[dict] = []
    for entry, (title_pairs, error) in zip(entries, results):
        if error is not None:
            logger.error("title %s failed: %s", entry.get("id"), error)
            failures.append({"id": entry.get("id"), "error": error})
        else:
            pairs.extend(title_pairs)
    return pairs, failures


def _load_gold(gold_dir: Path, title_id: str) -> GoldAlignment | None:
    path = Path(gold_dir) / f"{title_id}.json"
    if not path.is_file():
        return None
    return gold_from_json(path.read_text(encoding="utf-8"))


def run_eval(
    entries: Sequence[dict],
    gold_dir: Path,
    config: PipelineConfig,
    measures: Sequence[str] = MEASURES,
) -> dict:
    """Alignment accuracy and adjacency error rate per measure, pooled and per title."""
    gold_dir = Path(gold_dir)
    if not gold_dir.is_dir():
        raise MissingGold(f"gold directory not found: {gold_dir}")
    for measure in measures:
        if measure not in MEASURES:
            raise ConfigError(f"measure must be one of {MEASURES}")
    per_title: dict[str, dict] = {}
    totals = {measure: {"gold": 0, "hits": 0, "errors": 0, "adjacent": 0} for measure in measures}
    evaluated = 0
    for entry in entries:
        title_id = entry["id"]
        gold = _load_gold(gold_dir, title_id)
        if gold is None:
            logger.warning("no gold alignment for title %s, skipping", title_id)
            continue
        evaluated += 1
        segments, sessions = prepare_title(entry, config)
        title_report: dict[str, dict] = {}
        for measure in measures:
            sim = similarity_matrix(segments, sessions, measure)
            pred = align(sim, config.k_max, config.trailing_skip)
            title_report[measure] = {
                "accuracy": accuracy(pred, gold),
                "adjacency_error_rate": adjacency_error_rate(pred, gold),
            }
            bucket = totals[measure]
            for j, i in gold.assignment.items():
                bucket["gold"] += 1
                if pred.assignment.get(j) == i:
                    bucket["hits"] += 1
                else:
                    bucket["errors"] += 1
                    if j in pred.assignment and abs(pred.assignment[j] - i) == 1:
                        bucket["adjacent"] += 1
        per_title[title_id] = title_report
    if evaluated == 0:
        raise MissingGold(f"no gold alignment files under {gold_dir}")
    aggregate = {
        measure: {
            "accuracy": bucket["hits"] / bucket["gold"] if bucket["gold"] else 0.0,
            "adjacency_error_rate": (
                bucket["adjacent"] / bucket["errors"] if bucket["errors"] else 0.0
            ),
            "gold_labels": bucket["gold"],
        }
        for measure, bucket in totals.items()
    }
    return {
        "measures": aggregate,
        "titles": per_title,
        "k": config.k_max,
        "delta_t_ms": config.delta_t_ms,
        "titles_evaluated": evaluated,
    }
