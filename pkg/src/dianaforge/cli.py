"""Command-line interface for building and evaluating dialogue-narrative corpora.

Exit codes: 0 success, 1 usage or configuration error, 2 input error,
3 total pipeline failure.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .align import alignment_to_json
from .corpus import (
    EmptyCorpus,
    InvariantViolation,
    ParseFailure,
    TOKENIZER_LABEL,
    read_jsonl,
    stats,
    write_jsonl,
)
from .pipeline import (
    ConfigError,
    MissingGold,
    MissingInput,
    PipelineConfig,
    align_title,
    link_titles,
    load_manifest,
    load_sidecars,
    run_build,
    run_eval,
)
from .quality import filter_pairs
from .textsim import MEASURES

logger = logging.getLogger("dianaforge")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_PIPELINE = 3

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with exit code 2; this tool reserves 2 for input errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _setup_logging() -> None:
    level_name = os.environ.get("DIANA_FORGE_LOG", "warn").lower()
    level = _LOG_LEVELS.get(level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file; flags override it")
    parser.add_argument("--delta-t", type=int, dest="delta_t_ms", help="session gap threshold in ms")
    parser.add_argument("--k", type=int, dest="k_max", help="max narrative segments skipped per step")
    parser.add_argument("--measure", choices=MEASURES, help="similarity measure")
    parser.add_argument("--cov-min", type=float, dest="cov_min", help="coverage threshold (strict)")
    parser.add_argument("--den-min", type=float, dest="den_min", help="density threshold (strict)")
    parser.add_argument("--workers", type=int, help="worker pool size")


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {
        name: getattr(args, name, None)
        for name in ("delta_t_ms", "k_max", "measure", "cov_min", "den_min", "workers")
    }
    return PipelineConfig.load(getattr(args, "config", None), overrides)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_link(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    entries = load_sidecars(args.metadata_dir)
    manifest = link_titles(entries, config.link_threshold)
    if not manifest["pairs"]:
        logger.warning("no linked pairs (%d sidecar records scanned)", len(entries))
    _emit(json.dumps(manifest, ensure_ascii=False, indent=2), args.out)
    for skip in manifest["skipped"]:
        logger.info("skipped %s (%s): %s", skip["id"], skip["side"], skip["reason"])
    return EXIT_OK


def _cmd_build(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    entries = load_manifest(args.manifest)
    pairs, failures = run_build(entries, config)
    buffer = io.StringIO()
    count = write_jsonl(pairs, buffer)
    _emit(buffer.getvalue(), args.out)
    if pairs:
        report = asdict(stats(pairs))
    else:
        report = {"pair_count": 0}
    report["tokenizer"] = TOKENIZER_LABEL
    report["titles_failed"] = len(failures)
    report["titles_built"] = len(entries) - len(failures)
    sys.stderr.write(json.dumps(report, ensure_ascii=False) + "\n")
    logger.info("wrote %d pairs from %d titles", count, len(entries) - len(failures))
    if entries and len(failures) == len(entries):
        logger.error("all %d titles failed", len(entries))
        return EXIT_PIPELINE
    return EXIT_OK


def _cmd_align(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    entries = load_manifest(args.manifest)
    if args.title is not None:
        entries = [e for e in entries if e["id"] == args.title]
        if not entries:
            raise MissingInput(f"title {args.title!r} not in manifest")
    dumps = {}
    for entry in entries:
        artifacts = align_title(entry, config)
        dumps[entry["id"]] = json.loads(
            alignment_to_json(artifacts.alignment, config.k_max, config.measure)
        )
    text = json.dumps(dumps[args.title] if args.title else dumps, ensure_ascii=False, indent=2)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    entries = load_manifest(args.manifest)
    measures = [args.measure] if args.measure else list(MEASURES)
    report = run_eval(entries, args.gold, config, measures)
    _emit(json.dumps(report, ensure_ascii=False, indent=2), args.out)
    return EXIT_OK


def _read_corpus(path: Path):
    try:
        with open(path, encoding="utf-8") as handle:
            return read_jsonl(handle)
    except FileNotFoundError as exc:
        raise MissingInput(str(exc)) from exc


def _cmd_filter(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    pairs = _read_corpus(args.corpus)
    kept = filter_pairs(pairs, config.cov_min, config.den_min)
    buffer = io.StringIO()
    write_jsonl(kept, buffer)
    _emit(buffer.getvalue(), args.out)
    logger.info("kept %d of %d pairs", len(kept), len(pairs))
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    pairs = _read_corpus(args.corpus)
    try:
        report = asdict(stats(pairs))
    except EmptyCorpus:
        report = {"pair_count": 0}
    report["tokenizer"] = TOKENIZER_LABEL
    _emit(json.dumps(report, ensure_ascii=False, indent=2), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dianaforge",
        description="Align movie subtitles with synopsis sentences into a (dialogue, narrative) corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_link = sub.add_parser("link", help="pair subtitle and synopsis sidecars into a manifest")
    p_link.add_argument("metadata_dir", type=Path)
    p_link.add_argument("--out", type=Path)
    _add_config_flags(p_link)
    p_link.set_defaults(func=_cmd_link)

    p_build = sub.add_parser("build", help="build the corpus JSONL from a manifest")
    p_build.add_argument("manifest", type=Path)
    p_build.add_argument("--out", type=Path)
    _add_config_flags(p_build)
    p_build.set_defaults(func=_cmd_build)

    p_align = sub.add_parser("align", help="dump the alignment for manifest titles")
    p_align.add_argument("manifest", type=Path)
    p_align.add_argument("--title", help="restrict to one title id")
    p_align.add_argument("--out", type=Path)
    _add_config_flags(p_align)
    p_align.set_defaults(func=_cmd_align)

    p_eval = sub.add_parser("eval", help="score alignments against gold files")
    p_eval.add_argument("manifest", type=Path)
    p_eval.add_argument("--gold", type=Path, required=True, help="directory of <title_id>.json gold files")
    p_eval.add_argument("--out", type=Path)
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_filter = sub.add_parser("filter", help="re-filter an existing corpus by quality thresholds")
    p_filter.add_argument("corpus", type=Path)
    p_filter.add_argument("--out", type=Path)
    _add_config_flags(p_filter)
    p_filter.set_defaults(func=_cmd_filter)

    p_stats = sub.add_parser("stats", help="summarize an existing corpus")
    p_stats.add_argument("corpus", type=Path)
    p_stats.add_argument("--out", type=Path)
    p_stats.set_defaults(func=_cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_USAGE
    except (MissingInput, MissingGold, ParseFailure, InvariantViolation, FileNotFoundError) as exc:
        logger.error("input error: %s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
