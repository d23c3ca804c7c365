"""Pre-application mention-count baseline.

Ranks the non-excluded roster by mention count inside a window that closes
before the accelerator application deadline, so the signal is pure
pre-existing visibility, and emits an ordinary submission consumable by the
evaluation pipeline unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime, time as dtime, timezone

from .ingest import PRE_APPLICATION_WINDOW_W26, CollectionWindow
from .models import MentionRecord, PredictionSubmission, StartupRecord

log = logging.getLogger(__name__)

BASELINE_PREDICTOR_NAME = "google-mentions-pre-deadline"

DEFAULT_PRE_WINDOW = CollectionWindow(*PRE_APPLICATION_WINDOW_W26)


@dataclass(frozen=True)
class BaselineRun:
    window: CollectionWindow
    k: int
    submission: PredictionSubmission


def baseline_predict(
    pre_window_mentions: list[MentionRecord],
    roster: list[StartupRecord],
    k: int,
) -> PredictionSubmission:
    """Top-k candidate domains by descending pre-window mention count.

    Excluded roster records never appear; candidates without a mention
    record count as zero. Ties break by ascending domain so the submission
    is a deterministic function of its inputs. The submission timestamp is
    the window close (the moment the signal froze), not the wall clock.
    """
    candidates = [r for r in roster if not r.excluded]
    if k > len(candidates):
        raise ValueError(f"k={k} exceeds the {len(candidates)} candidate domains")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    counts = {rec.domain: rec.count for rec in pre_window_mentions}
    ranked = sorted(
        candidates, key=lambda r: (-counts.get(r.domain, 0), r.domain)
    )
    top = ranked[:k]
    if all(counts.get(r.domain, 0) == 0 for r in top):
        log.warning(
            "degenerate baseline: all selected counts are zero; "
            "ranking is tie-break order only"
        )

    window_end = max(
        (rec.window_end for rec in pre_window_mentions),
        default=DEFAULT_PRE_WINDOW.end,
    )
    batches = {r.batch for r in roster}
    batch = batches.pop() if len(batches) == 1 else ",".join(sorted(batches))
    return PredictionSubmission(
        predictor_name=BASELINE_PREDICTOR_NAME,
        batch=batch,
        created_at=datetime.combine(window_end, dtime.min, tzinfo=timezone.utc),
        ranked_domains=tuple(r.domain for r in top),
    )
