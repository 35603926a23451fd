"""Command-line pipeline: ingest, synthesize, filter-blind, eval, stats, decode.

Configuration resolves flags over environment variables (EGOQA_API_KEY,
EGOQA_BASE_URL) over a JSON --config file. Exit codes: 0 success, 2 input
validation failure, 3 endpoint failure, 4 internal invariant breach.

Commands stream their inputs row by row; only per-clip state and small
aggregates are held in memory.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import traceback
from typing import Any, Iterator, Mapping

from .blindfilter import (
    TRIALS,
    FilterReport,
    FilterRow,
    FrequencyPriorAnswerer,
    UniformRandomAnswerer,
    trial_outcomes,
)
from .chunking import chunk_track
from .core import (
    EgoqaError,
    EvalReport,
    InvariantBreach,
    MetricValue,
    Narration,
    NarrationTrack,
    PredictionSet,
    QASample,
    ServiceError,
    ValidationError,
    validate_track,
)
from .embedding import HttpEmbedder, TrigramEmbedder
from .endpoint import EndpointConfig, EndpointUnavailable, HttpChatEndpoint, MockChatEndpoint
from .jsonl_io import (
    EmptyCorpus,
    SchemaMismatch,
    UnreadableInput,
    dumps_canonical,
    make_meta,
    pred_to_row,
    qa_to_row,
    query_id_for,
    read_jsonl,
    row_to_head,
    row_to_pred,
    row_to_qa,
    row_to_track,
    track_to_row,
    write_jsonl,
)
from .localization import decode_windows
from .metrics import MissingQuery, closeqa_accuracy, openqa_report, vlg_recall
from .prompts import load_template
from .seeding import derive_seed
from .stats import StatsBuilder, stats_tsv_lines
from .synthesis import GenerationRecord, attach_distractors, generate_openqa
from .windows import NoIntervalData, compute_stats

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ENDPOINT = 3
EXIT_INTERNAL = 4


def _load_config_file(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise UnreadableInput(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise UnreadableInput(f"config file {path} must hold a JSON object")
    return config


def _resolve(
    args: argparse.Namespace,
    file_config: Mapping[str, Any],
    name: str,
    default: Any,
    env_var: str | None = None,
    cast=None,
):
    """flags > environment > config file > builtin default."""
    value = getattr(args, name, None)
    if value is None and env_var:
        value = os.environ.get(env_var) or None
    if value is None:
        value = file_config.get(name)
    if value is None:
        value = default
    if cast is not None and value is not None:
        value = cast(value)
    return value


def _endpoint_config(args: argparse.Namespace, file_config: Mapping[str, Any]) -> EndpointConfig:
    return EndpointConfig(
        base_url=_resolve(args, file_config, "base_url", "", "EGOQA_BASE_URL", str),
        model=_resolve(args, file_config, "model", "mock", None, str),
        temperature=_resolve(args, file_config, "temperature", 0.0, None, float),
        max_tokens=_resolve(args, file_config, "max_tokens", 128, None, int),
        request_timeout_s=_resolve(args, file_config, "timeout", 30.0, None, float),
        max_retries=_resolve(args, file_config, "max_retries", 2, None, int),
        parallelism=_resolve(args, file_config, "parallelism", 1, None, int),
    )


def _make_endpoint(args: argparse.Namespace, config: EndpointConfig):
    if getattr(args, "mock", None):
        return MockChatEndpoint.from_file(args.mock)
    if not config.base_url:
        raise ValidationError(
            "no endpoint configured: pass --base-url / EGOQA_BASE_URL or --mock"
        )
    return HttpChatEndpoint(config, api_key=os.environ.get("EGOQA_API_KEY"))


# ---------------------------------------------------------------- ingest


def _iter_export_tracks(path: str, which_pass: str) -> Iterator[NarrationTrack]:
    """Parse a raw narration export: {clip_uid: {duration_sec, narration_pass_*}}.

    Narration-level problems reject the narration; clip-level problems
    reject the clip. Both are logged with a reason code.
    """
    try:
        with open(path, encoding="utf-8") as f:
            export = json.load(f)
    except OSError as exc:
        raise UnreadableInput(f"cannot open {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UnreadableInput(f"{path}: not JSON: {exc}") from exc
    if not isinstance(export, dict):
        raise SchemaMismatch(f"{path}: export must be an object keyed by clip_uid")

    pass_keys = {
        "1": ("narration_pass_1",),
        "2": ("narration_pass_2",),
        "merge": ("narration_pass_1", "narration_pass_2"),
    }[which_pass]

    for clip_uid in sorted(export):
        entry = export[clip_uid]
        if not isinstance(entry, dict):
            log.warning("ingest reject clip %s: not_an_object", clip_uid)
            continue
        duration = entry.get("duration_sec")
        if not isinstance(duration, (int, float)) or duration <= 0:
            log.warning("ingest reject clip %s: bad_duration (%r)", clip_uid, duration)
            continue
        duration = float(duration)
        narrations = []
        for key in pass_keys:
            for item in (entry.get(key) or {}).get("narrations", []):
                text = item.get("narration_text")
                t_s = item.get("timestamp_sec")
                if not isinstance(text, str) or not text.strip():
                    log.warning("ingest reject narration in %s: empty_text", clip_uid)
                    continue
                if not isinstance(t_s, (int, float)):
                    log.warning("ingest reject narration in %s: bad_timestamp", clip_uid)
                    continue
                t_s = float(t_s)
                if t_s < 0:
                    log.warning(
                        "ingest reject narration in %s: negative_timestamp (%s)",
                        clip_uid,
                        t_s,
                    )
                    continue
                if t_s > duration:
                    log.warning(
                        "ingest reject narration in %s: timestamp_after_end (%s > %s)",
                        clip_uid,
                        t_s,
                        duration,
                    )
                    continue
                narrations.append(Narration(text=text.strip(), t_s=t_s))
        if not narrations:
            log.warning("ingest reject clip %s: no_usable_narrations", clip_uid)
            continue
        narrations.sort(key=lambda n: (n.t_s, n.text))
        yield NarrationTrack(clip_uid, duration, tuple(narrations))


def _sniff_jsonl_tracks(path: str) -> bool:
    try:
        with open(path, encoding="utf-8") as f:
            first = f.readline().strip()
    except OSError as exc:
        raise UnreadableInput(f"cannot open {path}: {exc}") from exc
    if not first:
        return False
    try:
        row = json.loads(first)
    except json.JSONDecodeError:
        return False
    return isinstance(row, dict) and (
        "_meta" in row or ("clip_uid" in row and "narrations" in row)
    )


def cmd_ingest(args: argparse.Namespace, file_config: Mapping[str, Any]) -> int:
    which_pass = _resolve(args, file_config, "narration_pass", "merge", None, str)
    if which_pass not in ("1", "2", "merge"):
        raise ValidationError(f"--pass must be 1, 2 or merge, got {which_pass!r}")

    if _sniff_jsonl_tracks(args.input):
        tracks = (
            row_to_track(row, f"{args.input}:{lineno}")
            for lineno, row in read_jsonl(args.input)
        )
    else:
        tracks = _iter_export_tracks(args.input, which_pass)

    def valid_rows():
        for track in tracks:
            violations = validate_track(track)
            if violations:
                log.warning(
                    "ingest reject clip %s: %s",
                    track.clip_uid,
                    ",".join(v.code for v in violations),
                )
                continue
            yield track_to_row(track)

    meta = make_meta({"command": "ingest", "narration_pass": which_pass})
    count = write_jsonl(args.out, valid_rows(), meta)
    log.info("ingest: wrote %d clips to %s", count, args.out)
    return EXIT_OK


# ------------------------------------------------------------ synthesize


def _record_to_row(record: GenerationRecord) -> dict[str, Any]:
    row: dict[str, Any] = {
        "kind": record.kind,
        "clip_uid": record.clip_uid,
        "ref": record.ref,
        "parse_status": record.parse_status,
        "attempts": record.attempts,
        "raw_completion": record.raw_completion,
    }
    for key in ("question", "answer", "reason"):
        value = getattr(record, key)
        if value is not None:
            row[key] = value
    if record.wrong_answers is not None:
        row["wrong_answers"] = list(record.wrong_answers)
    return row


def cmd_synthesize(args: argparse.Namespace, file_config: Mapping[str, Any]) -> int:
    config = _endpoint_config(args, file_config)
    endpoint = _make_endpoint(args, config)
    seed = _resolve(args, file_config, "seed", 0, None, int)
    split = _resolve(args, file_config, "split", "train", None, str)
    max_sentences = _resolve(args, file_config, "max_sentences", 5, None, int)
    max_span_s = _resolve(args, file_config, "max_span_s", 30.0, None, float)
    openqa_template = load_template(
        _resolve(args, file_config, "openqa_template", "openqa_llama", None, str)
    )
    closeqa_template = load_template("closeqa_llama")
    with_distractors = not getattr(args, "no_distractors", False)

    def iter_tracks() -> Iterator[NarrationTrack]:
        for lineno, row in read_jsonl(args.narrations):
            track = row_to_track(row, f"{args.narrations}:{lineno}")
            violations = validate_track(track)
            if violations:
                raise ValidationError(
                    f"{args.narrations}:{lineno}: invalid track "
                    f"{track.clip_uid!r}: {','.join(v.code for v in violations)}"
                )
            yield track

    # Pass 1: corpus timing statistics. compute_stats streams the tracks
    # and keeps one number per clip.
    seen = 0

    def counted() -> Iterator[NarrationTrack]:
        nonlocal seen
        for track in iter_tracks():
            seen += 1
            yield track

    try:
        stats = compute_stats(counted())
    except NoIntervalData:
        if seen == 0:
            raise EmptyCorpus(f"{args.narrations} has no clips") from None
        raise

    hashed_config = {
        "command": "synthesize",
        "model": config.model,
        "base_url": config.base_url,
        "temperature": config.temperature,
        "max_tokens": config.max_tokens,
        "max_retries": config.max_retries,
        "max_sentences": max_sentences,
        "max_span_s": max_span_s,
        "split": split,
        "openqa_template": openqa_template.template_id,
        "with_distractors": with_distractors,
        "seed": seed,
    }
    meta = make_meta(hashed_config, seed)

    builder = StatsBuilder()
    all_records: list[dict[str, Any]] = []
    failure: EndpointUnavailable | None = None

    def iter_sample_rows():
        nonlocal failure
        for track in iter_tracks():
            builder.add_narration_stats(len(track.narrations), track.duration_s)
            chunks = chunk_track(track, stats, max_sentences, max_span_s)
            try:
                samples, records = generate_openqa(
                    chunks,
                    {track.clip_uid: track},
                    config,
                    openqa_template,
                    endpoint,
                    split=split,
                )
            except EndpointUnavailable as exc:
                failure = exc
                samples, records = getattr(exc, "partial", ((), ()))
            all_records.extend(_record_to_row(r) for r in records)
            if failure is None and with_distractors:
                try:
                    samples, records = attach_distractors(
                        samples, config, closeqa_template, endpoint
                    )
                except EndpointUnavailable as exc:
                    failure = exc
                    samples, records = getattr(exc, "partial", (samples, ()))
                all_records.extend(_record_to_row(r) for r in records)
            for sample in samples:
                builder.add(sample)
                yield qa_to_row(sample)
            if failure is not None:
                return

    count = write_jsonl(args.out, iter_sample_rows(), meta)
    records_path = args.records or args.out + ".records.jsonl"
    write_jsonl(records_path, iter(all_records), meta)
    stats_path = args.stats_out or args.out + ".stats.json"
    if count:
        stats_doc = {"_meta": meta["_meta"], **builder.finalize().to_json_dict()}
        with open(stats_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(dumps_canonical(stats_doc) + "\n")
    log.info("synthesize: wrote %d samples to %s", count, args.out)
    if failure is not None:
        log.error("synthesize aborted early, partial results persisted: %s", failure)
        raise failure
    return EXIT_OK


# ----------------------------------------------------------- filter-blind


def cmd_filter_blind(args: argparse.Namespace, file_config: Mapping[str, Any]) -> int:
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",")]
    else:
        base = _resolve(args, file_config, "seed", 0, None, int)
        seeds = [derive_seed("blind-trial", base, t) for t in range(TRIALS)]
    if len(seeds) != TRIALS:
        raise ValidationError(f"exactly {TRIALS} seeds required, got {len(seeds)}")
    reshuffle = not getattr(args, "no_reshuffle", False)

    kind = _resolve(args, file_config, "answerer", "frequency", None, str)
    if kind == "frequency":
        train_path = args.train or args.qa
        answers = (row_to_qa(row, f"{train_path}:{n}").answer
                   for n, row in read_jsonl(train_path))
        answerer = FrequencyPriorAnswerer(answers)
    elif kind == "uniform":
        answerer = UniformRandomAnswerer()
    else:
        raise ValidationError(f"--answerer must be frequency or uniform, got {kind!r}")

    hashed_config = {
        "command": "filter-blind",
        "answerer": kind,
        "seeds": seeds,
        "reshuffle_per_trial": reshuffle,
    }
    meta = make_meta(hashed_config, seeds[0])

    rows: list[FilterRow] = []

    def iter_kept():
        for lineno, row in read_jsonl(args.qa):
            sample = row_to_qa(row, f"{args.qa}:{lineno}")
            outcomes = trial_outcomes(sample, answerer, seeds, reshuffle)
            removed = all(outcomes)
            rows.append(FilterRow(sample.clip_uid, sample.question, outcomes, removed))
            if not removed:
                yield qa_to_row(sample)

    kept_count = write_jsonl(args.out, iter_kept(), meta)
    report = FilterReport(
        total=len(rows),
        removed=sum(1 for r in rows if r.removed),
        kept=kept_count,
        rows=tuple(rows),
    )
    report_doc = {
        "_meta": meta["_meta"],
        "total": report.total,
        "removed": report.removed,
        "kept": report.kept,
        "rows": [
            {
                "clip_uid": r.clip_uid,
                "question": r.question,
                "outcomes": list(r.outcomes),
                "removed": r.removed,
            }
            for r in report.rows
        ],
    }
    report_path = args.report or args.out + ".report.json"
    with open(report_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_canonical(report_doc) + "\n")
    log.info(
        "filter-blind: kept %d/%d samples (%d removed)",
        report.kept,
        report.total,
        report.removed,
    )
    return EXIT_OK


# ------------------------------------------------------------------ eval


def _load_gt(path: str) -> dict[str, QASample]:
    """Ground truth keyed by positional query id (clip_uid::ordinal)."""
    gts: dict[str, QASample] = {}
    per_clip: dict[str, int] = {}
    for lineno, row in read_jsonl(path):
        sample = row_to_qa(row, f"{path}:{lineno}")
        ordinal = per_clip.get(sample.clip_uid, 0)
        per_clip[sample.clip_uid] = ordinal + 1
        gts[query_id_for(sample.clip_uid, ordinal)] = sample
    if not gts:
        raise EmptyCorpus(f"{path} has no samples")
    return gts


def _load_preds(path: str) -> dict[str, PredictionSet]:
    preds: dict[str, PredictionSet] = {}
    for lineno, row in read_jsonl(path):
        pred = row_to_pred(row, f"{path}:{lineno}")
        preds[pred.query_id] = pred
    return preds


def _report_doc(report: EvalReport, meta: Mapping[str, Any], task: str) -> dict[str, Any]:
    return {
        "_meta": dict(meta["_meta"]),
        "task": task,
        "metadata": dict(report.metadata),
        "metrics": {
            name: {
                "value": mv.value,
                "dispersion": mv.dispersion,
                "percent": report.render_percent(name),
            }
            for name, mv in report.metrics.items()
        },
    }


def cmd_eval(args: argparse.Namespace, file_config: Mapping[str, Any]) -> int:
    task = args.task
    gts = _load_gt(args.gt)
    expected = 5 if task == "closeqa" else 1
    if len(args.predictions) != expected:
        raise ValidationError(
            f"--task {task} needs exactly {expected} prediction file(s), "
            f"got {len(args.predictions)}"
        )

    hashed_config = {"command": "eval", "task": task}
    meta = make_meta(hashed_config)

    if task == "vlg":
        preds = _load_preds(args.predictions[0])
        result = vlg_recall(
            preds, {qid: s.window for qid, s in gts.items()}
        )
        report = EvalReport(
            metadata={"queries": len(gts)},
            metrics={
                name: MetricValue(value) for name, value in result.as_dict().items()
            },
        )
    elif task == "openqa":
        preds = _load_preds(args.predictions[0])
        missing = sorted(set(gts) - set(preds))
        if missing:
            raise MissingQuery(f"no predictions for queries: {missing}")
        pairs = [(preds[qid].answer_text, gts[qid].answer) for qid in sorted(gts)]
        embed_url = _resolve(args, file_config, "embed_url", "", None, str)
        if embed_url:
            embedder = HttpEmbedder(
                EndpointConfig(base_url=embed_url, model="remote-embedding"),
                api_key=os.environ.get("EGOQA_API_KEY"),
            )
        else:
            embedder = TrigramEmbedder()
        report = openqa_report(pairs, embedder)
    else:
        runs = []
        for path in args.predictions:
            preds = _load_preds(path)
            missing = sorted(set(gts) - set(preds))
            if missing:
                raise MissingQuery(f"{path}: no predictions for queries: {missing}")
            runs.append(
                [(preds[qid].answer_text, gts[qid].answer) for qid in sorted(gts)]
            )
        mean, std = closeqa_accuracy(runs)
        report = EvalReport(
            metadata={"queries": len(gts), "runs": 5},
            metrics={"accuracy": MetricValue(mean, std)},
        )

    doc = _report_doc(report, meta, task)
    out = args.out or "report.json"
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_canonical(doc) + "\n")
    for name in report.metrics:
        log.info("eval %s: %s = %s", task, name, report.render_percent(name))
    return EXIT_OK


# ----------------------------------------------------------------- stats


def cmd_stats(args: argparse.Namespace, file_config: Mapping[str, Any]) -> int:
    builder = StatsBuilder()
    for lineno, row in read_jsonl(args.qa):
        builder.add(row_to_qa(row, f"{args.qa}:{lineno}"))
    if builder.sample_count == 0:
        raise EmptyCorpus(f"{args.qa} has no samples")
    if args.narrations:
        for lineno, row in read_jsonl(args.narrations):
            track = row_to_track(row, f"{args.narrations}:{lineno}")
            builder.add_narration_stats(len(track.narrations), track.duration_s)
    stats = builder.finalize()

    meta = make_meta({"command": "stats"})
    doc = {"_meta": meta["_meta"], **stats.to_json_dict()}
    out = args.out or "stats.json"
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_canonical(doc) + "\n")
    if args.tsv_dir:
        os.makedirs(args.tsv_dir, exist_ok=True)
        for name in (
            "window_duration_s",
            "question_words",
            "answer_words",
            "distractor_words",
        ):
            path = os.path.join(args.tsv_dir, f"{name}.tsv")
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write("\n".join(stats_tsv_lines(stats, name)))
                f.write("\n")
    log.info(
        "stats: %d samples over %d clips (questions avg %.2f words)",
        stats.sample_count,
        stats.clip_count,
        stats.question_words_mean,
    )
    return EXIT_OK


# ---------------------------------------------------------------- decode


def cmd_decode(args: argparse.Namespace, file_config: Mapping[str, Any]) -> int:
    score_threshold = _resolve(args, file_config, "score_threshold", 0.05, None, float)
    nms_iou = _resolve(args, file_config, "nms_iou", 0.5, None, float)
    top_k = _resolve(args, file_config, "top_k", 5, None, int)

    hashed_config = {
        "command": "decode",
        "score_threshold": score_threshold,
        "nms_iou": nms_iou,
        "top_k": top_k,
    }
    meta = make_meta(hashed_config)

    def iter_rows():
        for lineno, row in read_jsonl(args.head_outputs):
            clip_uid, query_id, duration_s, heads = row_to_head(
                row, f"{args.head_outputs}:{lineno}"
            )
            windows = decode_windows(heads, duration_s, score_threshold, nms_iou, top_k)
            yield pred_to_row(
                PredictionSet(
                    clip_uid=clip_uid,
                    query_id=query_id,
                    windows=windows,
                    answer_text="",
                )
            )

    count = write_jsonl(args.out, iter_rows(), meta)
    log.info("decode: wrote %d prediction rows to %s", count, args.out)
    return EXIT_OK


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egoqa",
        description=(
            "Synthesize grounded QA datasets from timestamped narrations and "
            "evaluate grounding and answering predictions."
        ),
    )
    parser.add_argument("--config", help="JSON file with default parameter values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a raw narration export into narrations.jsonl")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--pass", dest="narration_pass", choices=("1", "2", "merge"))

    p = sub.add_parser("synthesize", help="generate QA pairs and distractors")
    p.add_argument("narrations")
    p.add_argument("--out", required=True)
    p.add_argument("--records", help="audit records path (default <out>.records.jsonl)")
    p.add_argument("--stats-out", help="dataset stats path (default <out>.stats.json)")
    p.add_argument("--seed", type=int)
    p.add_argument("--split", choices=("train", "val", "test"))
    p.add_argument("--max-sentences", type=int)
    p.add_argument("--max-span-s", type=float)
    p.add_argument("--openqa-template", choices=("openqa_llama", "openqa_chat"))
    p.add_argument("--no-distractors", action="store_true")
    p.add_argument("--mock", help="fixture file for the in-process mock endpoint")
    p.add_argument("--base-url")
    p.add_argument("--model")
    p.add_argument("--temperature", type=float)
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--max-retries", type=int)
    p.add_argument("--parallelism", type=int)

    p = sub.add_parser("filter-blind", help="drop questions a blind answerer always gets right")
    p.add_argument("qa")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="report path (default <out>.report.json)")
    p.add_argument("--seeds", help="10 comma-separated trial seeds")
    p.add_argument("--seed", type=int, help="base seed used to derive the 10 trial seeds")
    p.add_argument("--answerer", choices=("frequency", "uniform"))
    p.add_argument("--train", help="qa.jsonl supplying the frequency prior (default: input)")
    p.add_argument("--no-reshuffle", action="store_true",
                   help="reuse the first trial's choice order in every trial")

    p = sub.add_parser("eval", help="evaluate predictions against ground truth")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--gt", required=True)
    p.add_argument("--task", choices=("vlg", "openqa", "closeqa"), required=True)
    p.add_argument("--out")
    p.add_argument("--embed-url", dest="embed_url",
                   help="remote embedding endpoint; default is the offline embedder")

    p = sub.add_parser("stats", help="dataset statistics report")
    p.add_argument("qa")
    p.add_argument("--out")
    p.add_argument("--narrations", help="narrations.jsonl for narration density")
    p.add_argument("--tsv-dir", help="directory for histogram TSVs")

    p = sub.add_parser("decode", help="decode head outputs into ranked windows")
    p.add_argument("head_outputs")
    p.add_argument("--out", required=True)
    p.add_argument("--score-threshold", type=float)
    p.add_argument("--nms-iou", type=float)
    p.add_argument("--top-k", type=int)

    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "synthesize": cmd_synthesize,
    "filter-blind": cmd_filter_blind,
    "eval": cmd_eval,
    "stats": cmd_stats,
    "decode": cmd_decode,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        file_config = _load_config_file(args.config)
        return COMMANDS[args.command](args, file_config)
    except ServiceError as exc:
        log.error("endpoint failure: %s", exc)
        return EXIT_ENDPOINT
    except ValidationError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_VALIDATION
    except InvariantBreach as exc:
        log.error("internal invariant breach: %s", exc)
        return EXIT_INTERNAL
    except EgoqaError as exc:
        log.error("internal error: %s", exc)
        return EXIT_INTERNAL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
