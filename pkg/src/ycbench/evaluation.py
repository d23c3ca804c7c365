"""Ground-truth resolution and submission scoring.

A submission's first K domains are compared as a set against the resolved
top-K (precision) and against the externally disclosed high-traction set
(recall). K's denominator is the full roster size, including excluded
records, while the candidate pool is the scored set; this keeps the decile
cut at the published batch size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date

from .models import PredictionSubmission, StartupRecord
from .scoring import BatchScores, sort_key


@dataclass(frozen=True)
class ResolvedTruth:
    """The resolved outcome a submission is judged against."""

    batch: str
    top_k_domains: tuple[str, ...]
    high_traction_domains: frozenset[str]
    resolved_at: date


@dataclass(frozen=True)
class EvaluationReport:
    precision_at_k: float
    recall_at_m: float | None
    lift_exact: float
    lift_rounded: float
    hits: frozenset[str]
    misses: frozenset[str]
    horizon_days: int


def resolve_truth(
    batch_scores: BatchScores,
    high_traction_domains: set[str] | frozenset[str],
    resolved_at: date,
    top_fraction: float = 0.10,
    roster_size: int | None = None,
    k: int | None = None,
) -> ResolvedTruth:
    """Take the top K = ceil(top_fraction * roster_size) scored domains.

    ``roster_size`` defaults to the number of scored entries; pass the full
    roster size when excluded records should still count toward the decile.
    An explicit ``k`` overrides the fraction entirely.
    """
    if not batch_scores.scores:
        raise ValueError("batch_scores is empty")
    scored_domains = {b.domain for b in batch_scores.scores}
    stray = sorted(set(high_traction_domains) - scored_domains)
    if stray:
        raise ValueError(f"high-traction domains not in the scored roster: {stray}")

    if k is None:
        n = roster_size if roster_size is not None else len(batch_scores.scores)
        k = math.ceil(top_fraction * n)
    if not 0 < k <= len(batch_scores.scores):
        raise ValueError(
            f"k must be in 1..{len(batch_scores.scores)}, got {k}"
        )
    ranked = sorted(batch_scores.scores, key=sort_key)
    return ResolvedTruth(
        batch=batch_scores.batch,
        top_k_domains=tuple(b.domain for b in ranked[:k]),
        high_traction_domains=frozenset(high_traction_domains),
        resolved_at=resolved_at,
    )


def validate_submission(
    submission: PredictionSubmission, roster: list[StartupRecord]
) -> list[str]:
    """Check every ranked domain resolves to a known, non-excluded record."""
    problems = []
    by_domain = {r.domain: r for r in roster}
    for domain in submission.ranked_domains:
        rec = by_domain.get(domain)
        if rec is None:
            problems.append(f"unknown domain {domain!r}")
        elif rec.excluded:
            problems.append(f"excluded domain {domain!r}")
    return problems


def _first_k(submission: PredictionSubmission, k: int) -> list[str]:
    if len(submission.ranked_domains) < k:
        raise ValueError(
            f"submission ranks {len(submission.ranked_domains)} domains, "
            f"but {k} are scored"
        )
    return list(submission.ranked_domains[:k])


def precision_at_k(submission: PredictionSubmission, truth: ResolvedTruth) -> float:
    """Fraction of the first K predictions found in the resolved top K."""
    k = len(truth.top_k_domains)
    predicted = set(_first_k(submission, k))
    return len(predicted & set(truth.top_k_domains)) / k


def recall_at_m(submission: PredictionSubmission, truth: ResolvedTruth) -> float | None:
    """Fraction of the high-traction set recovered within the first K.

    Returns None (not applicable) when the high-traction set is empty.
    """
    m = len(truth.high_traction_domains)
    if m == 0:
        return None
    k = len(truth.top_k_domains)
    predicted = set(_first_k(submission, k))
    return len(predicted & truth.high_traction_domains) / m


def lift_over_random(precision: float, k: int, n: int) -> tuple[float, float]:
    """Lift vs a uniform random predictor.

    Returns (exact, rounded-baseline) where exact divides by k/n and the
    rounded variant divides by a flat 10% so headline numbers stay
    comparable across batch sizes. The two are labeled, never interchanged.
    """
    if n <= 0 or k <= 0 or k > n:
        raise ValueError(f"need 0 < k <= n, got k={k} n={n}")
    return precision / (k / n), precision / 0.10


def evaluate_submission(
    submission: PredictionSubmission,
    truth: ResolvedTruth,
    roster_size: int,
) -> EvaluationReport:
    """Full report for one submission against the resolved truth."""
    k = len(truth.top_k_domains)
    predicted = set(_first_k(submission, k))
    truth_set = set(truth.top_k_domains)
    precision = len(predicted & truth_set) / k
    lift_exact, lift_rounded = lift_over_random(precision, k, roster_size)
    horizon = (truth.resolved_at - submission.created_at.date()).days
    return EvaluationReport(
        precision_at_k=precision,
        recall_at_m=recall_at_m(submission, truth),
        lift_exact=lift_exact,
        lift_rounded=lift_rounded,
        hits=frozenset(predicted & truth_set),
        misses=frozenset(predicted - truth_set),
        horizon_days=horizon,
    )
