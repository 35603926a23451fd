"""Streaming JSONL persistence with deterministic metadata headers.

Every dataset file is UTF-8 JSON objects, one per line, preceded by a
{"_meta": ...} header carrying the tool version, a configuration hash and
the seed. The header deliberately has no timestamp and the hash excludes
parallelism, timeouts and paths, so equal-configuration runs produce
byte-identical files. Keys are sorted and separators compact, making the
encoding canonical.

Readers are generators: rows are decoded as they stream, so memory stays
bounded by the largest row, not the corpus.
"""
from __future__ import annotations

import hashlib
import json
import os
from typing import Any, Iterable, Iterator, Mapping

from .core import (
    Narration,
    NarrationTrack,
    PredictionSet,
    QASample,
    TemporalWindow,
    ValidationError,
)
from .localization import HeadOutputs

TOOL_NAME = "egoqa"

# Configuration keys that never influence output payloads: execution-shape
# and location parameters. Excluded from the config hash so, for example,
# parallelism 1 and 4 hash identically.
VOLATILE_CONFIG_KEYS = frozenset(
    {"parallelism", "request_timeout_s", "paths", "quiet", "verbose"}
)


class UnreadableInput(ValidationError):
    """File missing, undecodable, or not JSONL."""


class SchemaMismatch(ValidationError):
    """A row decoded but does not match the expected record shape."""


class EmptyCorpus(ValidationError):
    """An input dataset contains no payload rows."""


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def config_hash(config: Mapping[str, Any]) -> str:
    """Stable hex digest of the semantically relevant configuration."""
    semantic = {
        k: v
        for k, v in config.items()
        if k not in VOLATILE_CONFIG_KEYS and not _is_pathlike_key(k)
    }
    return hashlib.sha256(dumps_canonical(semantic).encode("utf-8")).hexdigest()[:16]


def _is_pathlike_key(key: str) -> bool:
    return key.endswith(("_path", "_file", "_dir")) or key in {"input", "output", "out"}


def make_meta(config: Mapping[str, Any], seed: int | None = None) -> dict[str, Any]:
    from . import __version__

    return {
        "_meta": {
            "tool": TOOL_NAME,
            "version": __version__,
            "config_hash": config_hash(config),
            "seed": seed,
        }
    }


def write_jsonl(
    path: str, rows: Iterable[Mapping[str, Any]], meta: Mapping[str, Any] | None = None
) -> int:
    """Write a header (if given) plus rows; returns the payload row count."""
    count = 0
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        if meta is not None:
            f.write(dumps_canonical(meta) + "\n")
        for row in rows:
            f.write(dumps_canonical(row) + "\n")
            count += 1
    os.replace(tmp, path)
    return count


def read_jsonl(path: str) -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield (1-based line number, row) for each payload row, lazily.

    A leading {"_meta": ...} row is skipped; use read_meta to inspect it.
    """
    try:
        f = open(path, encoding="utf-8")
    except OSError as exc:
        raise UnreadableInput(f"cannot open {path}: {exc}") from exc
    with f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise UnreadableInput(f"{path}:{lineno}: not JSON: {exc}") from exc
            if not isinstance(row, dict):
                raise SchemaMismatch(f"{path}:{lineno}: row is not an object")
            if lineno == 1 and "_meta" in row:
                continue
            yield lineno, row


def read_meta(path: str) -> dict[str, Any] | None:
    """Return the header's _meta object, or None when the file has none."""
    try:
        with open(path, encoding="utf-8") as f:
            first = f.readline().strip()
    except OSError as exc:
        raise UnreadableInput(f"cannot open {path}: {exc}") from exc
    if not first:
        return None
    try:
        row = json.loads(first)
    except json.JSONDecodeError:
        return None
    if isinstance(row, dict) and isinstance(row.get("_meta"), dict):
        return row["_meta"]
    return None


def _need(row: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in row:
        raise SchemaMismatch(f"{where}: missing field {key!r}")
    return row[key]


def track_to_row(track: NarrationTrack) -> dict[str, Any]:
    return {
        "clip_uid": track.clip_uid,
        "duration_s": track.duration_s,
        "narrations": [{"text": n.text, "t_s": n.t_s} for n in track.narrations],
    }


def row_to_track(row: Mapping[str, Any], where: str = "row") -> NarrationTrack:
    try:
        narrations = tuple(
            Narration(text=str(_need(n, "text", where)), t_s=float(_need(n, "t_s", where)))
            for n in _need(row, "narrations", where)
        )
        return NarrationTrack(
            clip_uid=str(_need(row, "clip_uid", where)),
            duration_s=float(_need(row, "duration_s", where)),
            narrations=narrations,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaMismatch(f"{where}: bad narration track: {exc}") from exc


def qa_to_row(sample: QASample) -> dict[str, Any]:
    row: dict[str, Any] = {
        "clip_uid": sample.clip_uid,
        "question": sample.question,
        "answer": sample.answer,
        "window": [sample.window.start_s, sample.window.end_s],
        "split": sample.split,
        "source": sample.source,
    }
    if sample.wrong_answers is not None:
        row["wrong_answers"] = list(sample.wrong_answers)
    return row


def row_to_qa(row: Mapping[str, Any], where: str = "row") -> QASample:
    try:
        window = _need(row, "window", where)
        wrong = row.get("wrong_answers")
        return QASample(
            clip_uid=str(_need(row, "clip_uid", where)),
            question=str(_need(row, "question", where)),
            answer=str(_need(row, "answer", where)),
            window=TemporalWindow(float(window[0]), float(window[1])),
            wrong_answers=tuple(str(w) for w in wrong) if wrong is not None else None,
            split=str(_need(row, "split", where)),
            source=str(_need(row, "source", where)),
        )
    except (TypeError, ValueError, IndexError, ValidationError) as exc:
        if isinstance(exc, SchemaMismatch):
            raise
        raise SchemaMismatch(f"{where}: bad qa sample: {exc}") from exc


def pred_to_row(pred: PredictionSet) -> dict[str, Any]:
    return {
        "clip_uid": pred.clip_uid,
        "query_id": pred.query_id,
        "windows": [[w.start_s, w.end_s, score] for w, score in pred.windows],
        "answer_text": pred.answer_text,
    }


def row_to_pred(row: Mapping[str, Any], where: str = "row") -> PredictionSet:
    try:
        triples = [
            (TemporalWindow(float(w[0]), float(w[1])), float(w[2]))
            for w in _need(row, "windows", where)
        ]
        # Tolerate unranked exports: order by score descending, stable.
        triples.sort(key=lambda pair: -pair[1])
        return PredictionSet(
            clip_uid=str(_need(row, "clip_uid", where)),
            query_id=str(_need(row, "query_id", where)),
            windows=tuple(triples),
            answer_text=str(row.get("answer_text", "")),
        )
    except (TypeError, ValueError, IndexError, ValidationError) as exc:
        if isinstance(exc, SchemaMismatch):
            raise
        raise SchemaMismatch(f"{where}: bad prediction set: {exc}") from exc


def head_to_row(
    clip_uid: str, query_id: str, duration_s: float, heads: HeadOutputs
) -> dict[str, Any]:
    return {
        "clip_uid": clip_uid,
        "query_id": query_id,
        "duration_s": duration_s,
        "scores": list(heads.scores),
        "offsets": [list(pair) for pair in heads.offsets],
    }


def row_to_head(
    row: Mapping[str, Any], where: str = "row"
) -> tuple[str, str, float, HeadOutputs]:
    try:
        heads = HeadOutputs(
            scores=tuple(float(s) for s in _need(row, "scores", where)),
            offsets=tuple(
                (float(o[0]), float(o[1])) for o in _need(row, "offsets", where)
            ),
        )
        return (
            str(_need(row, "clip_uid", where)),
            str(_need(row, "query_id", where)),
            float(_need(row, "duration_s", where)),
            heads,
        )
    except (TypeError, ValueError, IndexError, ValidationError) as exc:
        if isinstance(exc, SchemaMismatch):
            raise
        raise SchemaMismatch(f"{where}: bad head outputs: {exc}") from exc


def query_id_for(clip_uid: str, ordinal: int) -> str:
    """Positional query id for ground-truth rows: '<clip_uid>::<k>'.

    Ground-truth files carry no explicit query ids; the k-th sample of a
    clip (0-based, in file order) gets this id, and prediction files must
    reference it.
    """
    return f"{clip_uid}::{ordinal}"
