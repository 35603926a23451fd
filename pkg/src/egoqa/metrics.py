"""Evaluation suite: grounding recall, text metrics, seeded accuracy.

ROUGE-L and METEOR share one tokenization rule (lowercase, ASCII
alphanumeric runs) so goldens stay bit-exact. METEOR is the exact-match
stage only: no stemming or synonymy, which keeps the metric self-contained
and regression-stable; scores are therefore not comparable with
implementations that stem.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import (
    EvalReport,
    InvariantBreach,
    MetricValue,
    PredictionSet,
    TemporalWindow,
    ValidationError,
    normalize_answer,
)
from .embedding import Embedder

K_VALUES = (1, 5)
M_VALUES = (0.3, 0.5)

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Exact chunk-minimizing alignment is searched only while the state space
# stays below these caps; longer inputs fall back to a deterministic greedy
# alignment (still a maximal matching, chunks possibly suboptimal).
_ALIGN_MAX_REF = 20
_ALIGN_MAX_STATES = 200_000


class MissingQuery(ValidationError):
    """Ground-truth queries lack prediction entries."""


class RunLengthMismatch(ValidationError):
    """Seeded accuracy runs disagree in count or length."""


class EmptyEvaluation(ValidationError):
    """No data to evaluate."""


def iou_1d(a: TemporalWindow, b: TemporalWindow) -> float:
    """Interval intersection-over-union; 0 when the union has zero length."""
    inter = max(0.0, min(a.end_s, b.end_s) - max(a.start_s, b.start_s))
    union = a.length_s + b.length_s - inter
    if union <= 0.0:
        return 0.0
    return inter / union


@dataclass(frozen=True)
class VLGResult:
    """Recall at k in {1, 5} and IoU threshold m in {0.3, 0.5}.

    mean_r1 is the average of the two Recall@1 values. The monotonicity
    invariants (deeper k never hurts, looser m never hurts) are asserted at
    construction.
    """

    r1_at_03: float
    r1_at_05: float
    r5_at_03: float
    r5_at_05: float
    mean_r1: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not 0.0 <= value <= 1.0:
                raise InvariantBreach(f"{name} must lie in [0, 1], got {value}")
        if self.r5_at_03 < self.r1_at_03 or self.r5_at_05 < self.r1_at_05:
            raise InvariantBreach("recall@5 must be >= recall@1 at equal threshold")
        if self.r1_at_03 < self.r1_at_05 or self.r5_at_03 < self.r5_at_05:
            raise InvariantBreach("recall at IoU 0.3 must be >= recall at IoU 0.5")
        if self.mean_r1 != (self.r1_at_03 + self.r1_at_05) / 2.0:
            raise InvariantBreach("mean_r1 must average the two recall@1 values")

    def as_dict(self) -> dict[str, float]:
        return {
            "recall@1_iou0.3": self.r1_at_03,
            "recall@1_iou0.5": self.r1_at_05,
            "recall@5_iou0.3": self.r5_at_03,
            "recall@5_iou0.5": self.r5_at_05,
            "mean_recall@1": self.mean_r1,
        }


def vlg_recall(
    preds: Mapping[str, PredictionSet], gts: Mapping[str, TemporalWindow]
) -> VLGResult:
    """Fraction of queries whose top-k windows contain one with IoU >= m."""
    missing = sorted(set(gts) - set(preds))
    if missing:
        raise MissingQuery(f"no predictions for queries: {missing}")
    if not gts:
        raise EmptyEvaluation("no ground-truth queries")

    hits = {(k, m): 0 for k in K_VALUES for m in M_VALUES}
    for query_id, gt in gts.items():
        ious = [iou_1d(w, gt) for w, _ in preds[query_id].windows]
        for k in K_VALUES:
            top = ious[:k]
            for m in M_VALUES:
                if any(v >= m for v in top):
                    hits[(k, m)] += 1
    n = len(gts)
    r = {key: count / n for key, count in hits.items()}
    return VLGResult(
        r1_at_03=r[(1, 0.3)],
        r1_at_05=r[(1, 0.5)],
        r5_at_03=r[(5, 0.3)],
        r5_at_05=r[(5, 0.5)],
        mean_r1=(r[(1, 0.3)] + r[(1, 0.5)]) / 2.0,
    )


def tokenize(text: str) -> list[str]:
    """Shared metric tokenization: lowercase ASCII alphanumeric runs."""
    return _TOKEN_RE.findall(text.lower())


def _lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l_f(hypothesis: str, reference: str) -> float:
    """ROUGE-L f-score with the balanced harmonic mean (beta = 1)."""
    hyp = tokenize(hypothesis)
    ref = tokenize(reference)
    lcs = _lcs_len(hyp, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(hyp)
    recall = lcs / len(ref)
    return 2.0 * precision * recall / (precision + recall)


def _align(hyp: list[str], ref: list[str]) -> tuple[int, int]:
    """Maximal one-to-one exact alignment; returns (matches, min chunks).

    The match count is fixed by per-token multiset overlap; among alignments
    achieving it, chunks (runs of pairs adjacent in both sequences) are
    minimized, i.e. adjacency links are maximized. Per-token skip budgets
    keep every explored branch maximal: a hypothesis token may go unmatched
    only as often as its surplus over the reference allows.
    """
    ref_count: dict[str, int] = {}
    for w in ref:
        ref_count[w] = ref_count.get(w, 0) + 1
    hyp_count: dict[str, int] = {}
    for w in hyp:
        hyp_count[w] = hyp_count.get(w, 0) + 1
    m = sum(min(c, ref_count.get(w, 0)) for w, c in hyp_count.items())
    if m == 0:
        return 0, 0
    skip_budget = {w: c - min(c, ref_count.get(w, 0)) for w, c in hyp_count.items()}

    # Prefix occurrence counts let the skip budget be derived from (i, mask).
    occ_before = []
    seen: dict[str, int] = {}
    for w in hyp:
        occ_before.append(seen.get(w, 0))
        seen[w] = seen.get(w, 0) + 1
    ref_positions: dict[str, list[int]] = {}
    for j, w in enumerate(ref):
        ref_positions.setdefault(w, []).append(j)

    if len(ref) <= _ALIGN_MAX_REF:
        links = _align_exact(hyp, ref_positions, occ_before, skip_budget)
        if links is not None:
            return m, m - links
    return m, m - _align_greedy(hyp, ref)


def _align_exact(
    hyp: list[str],
    ref_positions: dict[str, list[int]],
    occ_before: list[int],
    skip_budget: dict[str, int],
) -> int | None:
    """Depth-first max-links search memoized on (i, used mask, prev ref pos).

    Returns None when the state cap trips, signaling the greedy fallback.
    """
    memo: dict[tuple[int, int, int], int] = {}
    n = len(hyp)

    def matched_of(word: str, mask: int) -> int:
        return sum(1 for j in ref_positions.get(word, ()) if mask >> j & 1)

    def best(i: int, mask: int, prev_j: int) -> int | None:
        if i == n:
            return 0
        key = (i, mask, prev_j)
        if key in memo:
            return memo[key]
        if len(memo) > _ALIGN_MAX_STATES:
            return None
        word = hyp[i]
        out = -1
        skipped = occ_before[i] - matched_of(word, mask)
        if skipped < skip_budget.get(word, 0):
            sub = best(i + 1, mask, -1)
            if sub is None:
                return None
            out = max(out, sub)
        for j in ref_positions.get(word, ()):
            if mask >> j & 1:
                continue
            sub = best(i + 1, mask | (1 << j), j)
            if sub is None:
                return None
            out = max(out, sub + (1 if j == prev_j + 1 and prev_j >= 0 else 0))
        memo[key] = out
        return out

    return best(0, 0, -1)


def _align_greedy(hyp: list[str], ref: list[str]) -> int:
    """Deterministic fallback: match left-to-right, continuing runs first.

    Never skips a matchable token, so the matching stays maximal; only the
    link count may fall short of the optimum.
    """
    used = [False] * len(ref)
    prev_j = -2
    links = 0
    for word in hyp:
        nxt = prev_j + 1
        if 0 <= nxt < len(ref) and ref[nxt] == word and not used[nxt]:
            j = nxt
        else:
            j = next((k for k, w in enumerate(ref) if w == word and not used[k]), -1)
        if j == -1:
            prev_j = -2
            continue
        used[j] = True
        if prev_j >= 0 and j == prev_j + 1:
            links += 1
        prev_j = j
    return links


def meteor_exact(hypothesis: str, reference: str) -> float:
    """Exact-match METEOR: unigram F-mean with a fragmentation penalty.

    m matched unigrams give P = m/|hyp|, R = m/|ref|, F = 10PR/(R + 9P);
    penalty = 0.5 * (chunks/m)^3; score = F * (1 - penalty). Zero overlap
    scores 0.
    """
    hyp = tokenize(hypothesis)
    ref = tokenize(reference)
    if not hyp or not ref:
        return 0.0
    m, chunks = _align(hyp, ref)
    if m == 0:
        return 0.0
    precision = m / len(hyp)
    recall = m / len(ref)
    f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
    penalty = 0.5 * (chunks / m) ** 3
    return f_mean * (1.0 - penalty)


def sentence_similarity(hypothesis: str, reference: str, embedder: Embedder) -> float:
    """Cosine similarity of the two embedded sentences."""
    v1 = embedder.embed(hypothesis)
    v2 = embedder.embed(reference)
    return float(np.clip(np.dot(v1, v2), -1.0, 1.0))


def closeqa_accuracy(
    runs: Sequence[Sequence[tuple[str, str]]],
) -> tuple[float, float]:
    """Mean and sample standard deviation of accuracy over five seeded runs.

    Each run is a sequence of (predicted, correct) pairs over the same
    question set; a prediction counts when the normalized strings match.
    """
    if len(runs) != 5:
        raise RunLengthMismatch(f"exactly 5 runs required, got {len(runs)}")
    lengths = {len(run) for run in runs}
    if len(lengths) != 1:
        raise RunLengthMismatch(f"runs disagree in length: {sorted(lengths)}")
    if lengths == {0}:
        raise EmptyEvaluation("runs contain no question pairs")
    accuracies = [
        sum(
            1
            for predicted, correct in run
            if normalize_answer(predicted) == normalize_answer(correct)
        )
        / len(run)
        for run in runs
    ]
    return float(np.mean(accuracies)), float(np.std(accuracies, ddof=1))


def openqa_report(
    pairs: Sequence[tuple[str, str]], embedder: Embedder
) -> EvalReport:
    """Mean similarity, ROUGE-L and METEOR over (hypothesis, reference) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyEvaluation("no hypothesis/reference pairs")
    sim = float(np.mean([sentence_similarity(h, r, embedder) for h, r in pairs]))
    rouge = float(np.mean([rouge_l_f(h, r) for h, r in pairs]))
    meteor = float(np.mean([meteor_exact(h, r) for h, r in pairs]))
    return EvalReport(
        metadata={"embedder": getattr(embedder, "name", type(embedder).__name__),
                  "pairs": len(pairs)},
        metrics={
            "similarity": MetricValue(sim),
            "rouge_l": MetricValue(rouge),
            "meteor": MetricValue(meteor),
        },
    )
