"""QA pair and distractor generation against a chat endpoint.

Requests run on a bounded worker pool; results are re-assembled in an order
that is a pure function of the input order, never of completion order.
Every request leaves an audit record, so the number of records always
equals the number of chunks (or samples) submitted.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .chunking import NarrationChunk
from .core import NarrationTrack, QASample, ValidationError
from .endpoint import ChatEndpoint, EndpointConfig, EndpointUnavailable
from .prompts import (
    PARSE_MALFORMED,
    PARSE_OK,
    ParsedCompletion,
    PromptTemplate,
    parse_closeqa_completion,
    parse_openqa_completion,
    render_closeqa_prompt,
    render_openqa_prompt,
)
from .seeding import derive_seed

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationRecord:
    """Audit trail for one generation request.

    ref identifies the unit: the chunk index for openqa, the question text
    for closeqa. raw_completion is the last attempt's raw text.
    """

    kind: str
    clip_uid: str
    ref: str
    raw_completion: str
    parse_status: str
    attempts: int
    question: str | None = None
    answer: str | None = None
    wrong_answers: tuple[str, ...] | None = None
    reason: str | None = None


def _attempt_loop(
    endpoint: ChatEndpoint, prompt: str, parse, max_retries: int
) -> tuple[ParsedCompletion, str, int]:
    """Call the endpoint until the completion parses or retries run out.

    Only malformed completions are retried; constraint violations are final
    (resubmitting an identical prompt cannot fix an over-length answer at
    temperature 0, and truncating would fabricate data).
    """
    raw = ""
    parsed = ParsedCompletion(PARSE_MALFORMED, reason="no attempt made")
    attempts = 0
    for attempt in range(max_retries + 1):
        raw = endpoint.complete(prompt)
        attempts = attempt + 1
        parsed = parse(raw)
        if parsed.status != PARSE_MALFORMED:
            break
    return parsed, raw, attempts


def _run_jobs(jobs, worker, parallelism: int):
    """Run worker over jobs, returning results in input order.

    An EndpointUnavailable in any job is re-raised after the pool drains,
    carrying the successfully finished results so callers can persist a
    partial batch.
    """
    results: list = [None] * len(jobs)
    failure: EndpointUnavailable | None = None
    if parallelism == 1:
        for i, job in enumerate(jobs):
            try:
                results[i] = worker(job)
            except EndpointUnavailable as exc:
                failure = exc
                break
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(worker, job) for job in jobs]
            for i, future in enumerate(futures):
                try:
                    results[i] = future.result()
                except EndpointUnavailable as exc:
                    failure = failure or exc
    done = [r for r in results if r is not None]
    return done, failure


def generate_openqa(
    chunks: Sequence[NarrationChunk],
    tracks: Mapping[str, NarrationTrack],
    config: EndpointConfig,
    template: PromptTemplate,
    endpoint: ChatEndpoint,
    split: str = "train",
) -> tuple[tuple[QASample, ...], tuple[GenerationRecord, ...]]:
    """One QA pair per chunk; window = the chunk's merged narration span.

    Output is sorted by (clip_uid, chunk_index). Completions that stay
    malformed after retries, or violate the length constraints, are dropped
    with a record. Raises EndpointUnavailable (with partial results attached
    as exc.partial) if the endpoint dies mid-batch.
    """
    for chunk in chunks:
        if chunk.clip_uid not in tracks:
            raise ValidationError(f"chunk references unknown clip {chunk.clip_uid!r}")

    ordered = sorted(chunks, key=lambda c: (c.clip_uid, c.chunk_index))

    def worker(chunk: NarrationChunk):
        prompt = render_openqa_prompt(chunk, tracks[chunk.clip_uid], template)
        parsed, raw, attempts = _attempt_loop(
            endpoint, prompt, parse_openqa_completion, config.max_retries
        )
        record = GenerationRecord(
            kind="openqa",
            clip_uid=chunk.clip_uid,
            ref=str(chunk.chunk_index),
            raw_completion=raw,
            parse_status=parsed.status,
            attempts=attempts,
            question=parsed.question,
            answer=parsed.answer,
            reason=parsed.reason,
        )
        sample = None
        if parsed.status == PARSE_OK:
            sample = QASample(
                clip_uid=chunk.clip_uid,
                question=parsed.question,
                answer=parsed.answer,
                window=chunk.span,
                split=split,
                source="synthesized",
            )
        return sample, record

    start = time.monotonic()
    done, failure = _run_jobs(ordered, worker, config.parallelism)
    samples = tuple(s for s, _ in done if s is not None)
    records = tuple(r for _, r in done)
    elapsed = max(time.monotonic() - start, 1e-9)
    errors = sum(1 for r in records if r.parse_status != PARSE_OK)
    log.info(
        "openqa: %d/%d pairs in %.2fs (%.0f pairs/hour, %.1f%% generation errors)",
        len(samples),
        len(records),
        elapsed,
        len(samples) / elapsed * 3600.0,
        100.0 * errors / max(len(records), 1),
    )
    if failure is not None:
        exc = EndpointUnavailable(f"openqa batch aborted: {failure}")
        exc.partial = (samples, records)
        raise exc
    return samples, records


def attach_distractors(
    samples: Sequence[QASample],
    config: EndpointConfig,
    template: PromptTemplate,
    endpoint: ChatEndpoint,
) -> tuple[tuple[QASample, ...], tuple[GenerationRecord, ...]]:
    """Generate three wrong answers per sample, preserving input order.

    Samples whose distractors cannot be generated are kept without
    wrong_answers and accounted for in the records. Samples that already
    carry distractors pass through untouched (no request, no record).
    """

    def worker(sample: QASample):
        if sample.wrong_answers is not None:
            return sample, None
        prompt = render_closeqa_prompt(sample.question, sample.answer, template)
        parsed, raw, attempts = _attempt_loop(
            endpoint,
            prompt,
            lambda r: parse_closeqa_completion(r, sample.answer),
            config.max_retries,
        )
        record = GenerationRecord(
            kind="closeqa",
            clip_uid=sample.clip_uid,
            ref=sample.question,
            raw_completion=raw,
            parse_status=parsed.status,
            attempts=attempts,
            question=sample.question,
            answer=sample.answer,
            wrong_answers=parsed.distractors,
            reason=parsed.reason,
        )
        if parsed.status == PARSE_OK:
            return replace(sample, wrong_answers=parsed.distractors), record
        return sample, record

    start = time.monotonic()
    done, failure = _run_jobs(list(samples), worker, config.parallelism)
    out = tuple(s for s, _ in done)
    records = tuple(r for _, r in done if r is not None)
    elapsed = max(time.monotonic() - start, 1e-9)
    ok = sum(1 for r in records if r.parse_status == PARSE_OK)
    if records:
        log.info(
            "closeqa: %d/%d distractor sets in %.2fs (%.0f samples/hour)",
            ok,
            len(records),
            elapsed,
            ok / elapsed * 3600.0,
        )
    if failure is not None:
        exc = EndpointUnavailable(f"distractor batch aborted: {failure}")
        exc.partial = (out, records)
        raise exc
    return out, records


def shuffled_choices(sample: QASample, seed: int) -> tuple[tuple[str, str, str, str], int]:
    """Materialize the four answer choices in a seeded deterministic order.

    The shuffle is a pure function of (seed, clip_uid, question, answer), so
    serialization and blind-filter trials agree without storing the order on
    the sample. Returns (choices, index of the correct answer).
    """
    if sample.wrong_answers is None:
        raise ValidationError(
            f"sample {sample.clip_uid!r}/{sample.question!r} has no distractors"
        )
    pool = (sample.answer, *sample.wrong_answers)
    rng = np.random.default_rng(
        derive_seed("choices", seed, sample.clip_uid, sample.question, sample.answer)
    )
    perm = [int(p) for p in rng.permutation(4)]
    choices = tuple(pool[p] for p in perm)
    return choices, perm.index(0)
