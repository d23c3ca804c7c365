"""Pre-Demo Day scoring: weighted traction signals, velocity, attention.

Formula per startup:

    traction  = max_k(w_k * x_k)             over disclosed signals k
    traction *= (1 + velocity_coefficient * g)   when the dominant signal
                                                 discloses growth g
    attention = w_m * mention_count
    combined  = max(traction, attention)

All functions are pure; ``score_batch`` is deterministic for fixed inputs
and config.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .models import (
    Driver,
    MentionRecord,
    ScoreBreakdown,
    ScoringConfig,
    SignalKind,
    SignalObservation,
    StartupRecord,
    config_fingerprint,
    normalize_value,
)

log = logging.getLogger(__name__)


class TractionResult(NamedTuple):
    score: float
    dominant_signal: SignalKind
    multiplier: float


@dataclass(frozen=True)
class BatchScores:
    """All breakdowns for one batch, sorted descending by combined score.

    Ties break by attention score (equivalently raw mention count, since the
    attention weight is a fixed positive factor), then ascending domain, so
    the order is total and reruns are identical.
    """

    batch: str
    scores: tuple[ScoreBreakdown, ...]
    config_fingerprint: str


def sort_key(breakdown: ScoreBreakdown) -> tuple[float, float, str]:
    return (-breakdown.pre_demo_day_score, -breakdown.attention_score, breakdown.domain)


def traction_score(
    observations: Iterable[SignalObservation], config: ScoringConfig
) -> TractionResult | None:
    """Score one startup's disclosed signals.

    Returns None for an empty observation list ("no traction" is distinct
    from a disclosed zero). The velocity multiplier uses the growth of the
    dominant (argmax) observation only; with the positive-only flag set it
    fires only for g > 0, otherwise it is floored at zero so a heavy decline
    cannot produce a negative score.
    """
    best: SignalObservation | None = None
    best_value = 0.0
    for obs in observations:
        weighted = config.weights[obs.kind] * normalize_value(obs, config)
        if best is None or weighted > best_value:
            best = obs
            best_value = weighted
    if best is None:
        return None

    multiplier = 1.0
    growth = best.mom_growth
    if growth is not None:
        if growth > 0 or not config.apply_velocity_only_when_positive:
            multiplier = max(0.0, 1.0 + config.velocity_coefficient * growth)
    return TractionResult(best_value * multiplier, best.kind, multiplier)


def attention_score(mention_count: int, config: ScoringConfig) -> float:
    """Web-attention score: attention_weight * mention count."""
    if mention_count < 0:
        raise ValueError(f"mention_count must be >= 0, got {mention_count}")
    return config.attention_weight * mention_count


def pre_demo_day_score(
    domain: str, traction: TractionResult | None, attention: float
) -> ScoreBreakdown:
    """Combine the two signals via max; the larger component sets the driver.

    A startup with traction exactly equal to attention counts as
    traction-driven (disclosed data beats inferred visibility).
    """
    traction_value = traction.score if traction is not None else None
    combined = max(traction_value or 0.0, attention)
    traction_wins = traction_value is not None and traction_value >= attention
    return ScoreBreakdown(
        domain=domain,
        traction_score=traction_value,
        dominant_signal=traction.dominant_signal if traction else None,
        velocity_multiplier_applied=traction.multiplier if traction else 1.0,
        attention_score=attention,
        pre_demo_day_score=combined,
        driver=Driver.TRACTION if traction_wins else Driver.ATTENTION,
    )


def score_batch(
    roster: Iterable[StartupRecord],
    observations: Iterable[SignalObservation],
    mentions: Iterable[MentionRecord],
    config: ScoringConfig,
    warning_sink: list[str] | None = None,
) -> BatchScores:
    """Score every non-excluded startup of a batch.

    Mentions missing for a candidate domain are treated as count 0 with a
    machine-readable warning (so a batch can be scored mid-collection);
    traction observations for excluded or unknown domains are an error.
    """
    roster = list(roster)
    candidates = [r for r in roster if not r.excluded]
    candidate_domains = {r.domain for r in candidates}
    known_domains = {r.domain for r in roster}

    by_domain: dict[str, list[SignalObservation]] = {}
    for obs in observations:
        if obs.domain not in candidate_domains:
            status = "excluded" if obs.domain in known_domains else "unknown"
            raise ValueError(
                f"traction observation for {status} domain {obs.domain!r}"
            )
        by_domain.setdefault(obs.domain, []).append(obs)

    counts: dict[str, int] = {}
    for rec in mentions:
        counts[rec.domain] = rec.count

    missing = sorted(candidate_domains - counts.keys())
    if missing:
        warning = f"missing_mentions count=0 domains={','.join(missing)}"
        log.warning(warning)
        if warning_sink is not None:
            warning_sink.append(warning)

    breakdowns = []
    for rec in candidates:
        traction = traction_score(by_domain.get(rec.domain, []), config)
        attention = attention_score(counts.get(rec.domain, 0), config)
        breakdowns.append(pre_demo_day_score(rec.domain, traction, attention))
    breakdowns.sort(key=sort_key)

    batches = {r.batch for r in roster}
    batch = batches.pop() if len(batches) == 1 else ",".join(sorted(batches))
    return BatchScores(
        batch=batch,
        scores=tuple(breakdowns),
        config_fingerprint=config_fingerprint(config),
    )
