"""Concentration statistics over windowed mention counts.

Gini uses the mean-absolute-difference definition

    G = sum_ij |x_i - x_j| / (2 n^2 mu)

computed via the equivalent sorted-rank form (O(n log n)); the Lorenz curve
ties back to it through the trapezoid identity 1 - 2 * area = G, which the
test suite cross-checks. The power-law check is rank-frequency OLS in
log-log space, matching the visual diagnostic it feeds.

Degenerate inputs (all-zero vectors, too few positive points) yield None
("not applicable") rather than a fabricated number.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

DEFAULT_TOP_FRACTIONS = (0.01, 0.02, 0.05, 0.10, 0.25, 0.50)


@dataclass(frozen=True)
class ConcentrationReport:
    gini: float | None
    lorenz_points: tuple[tuple[float, float], ...]
    top_shares: dict[float, float | None]
    powerlaw_slope: float | None
    powerlaw_r2: float | None


def _as_counts(counts) -> np.ndarray:
    arr = np.asarray(counts, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("counts must be a non-empty 1-D sequence")
    if np.any(arr < 0):
        raise ValueError("counts must be non-negative")
    return arr


def gini(counts) -> float | None:
    """Gini coefficient in [0, 1); None for an all-zero vector.

    Sorted-rank form of the pairwise mean absolute difference:
    G = 2 * sum(i * x_(i)) / (n * total) - (n + 1) / n, ranks i = 1..n.
    """
    arr = _as_counts(counts)
    total = arr.sum()
    if total <= 0:
        return None
    n = arr.size
    ranked = np.sort(arr)
    weighted = float(np.arange(1, n + 1) @ ranked)
    return max(0.0, 2.0 * weighted / (n * total) - (n + 1) / n)


def lorenz(counts) -> tuple[tuple[float, float], ...]:
    """Lorenz polyline from (0, 0) to (1, 1), counts sorted ascending.

    Point i is (i/n, cumulative share of the i smallest counts). Returns an
    empty tuple for an all-zero vector.
    """
    arr = _as_counts(counts)
    total = arr.sum()
    if total <= 0:
        return ()
    n = arr.size
    cumulative = np.cumsum(np.sort(arr)) / total
    points = [(0.0, 0.0)]
    points.extend((float((i + 1) / n), float(cumulative[i])) for i in range(n))
    return tuple(points)


def top_share(counts, fraction: float) -> float | None:
    """Share of the total held by the ceil(fraction * n) largest counts."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    arr = _as_counts(counts)
    total = arr.sum()
    if total <= 0:
        return None
    take = ceil(fraction * arr.size)
    largest = np.sort(arr)[-take:]
    return float(largest.sum() / total)


def powerlaw_fit(counts) -> tuple[float, float] | None:
    """OLS slope and r^2 of log(count) on log(rank), ranks 1..m descending.

    Zero counts carry no rank (log undefined) and are dropped; fewer than
    three positive counts is not applicable. A constant positive vector has
    zero variance to explain, so it fits with slope 0 and r^2 = 1.
    """
    arr = _as_counts(counts)
    positive = np.sort(arr[arr > 0])[::-1]
    if positive.size < 3:
        return None
    log_rank = np.log(np.arange(1, positive.size + 1))
    log_count = np.log(positive)
    dx = log_rank - log_rank.mean()
    dy = log_count - log_count.mean()
    slope = float(dx @ dy / (dx @ dx))
    ss_tot = float(dy @ dy)
    if ss_tot == 0.0:
        return slope, 1.0
    residual = dy - slope * dx
    r2 = 1.0 - float(residual @ residual) / ss_tot
    return slope, r2


def concentration_report(
    counts, fractions: tuple[float, ...] = DEFAULT_TOP_FRACTIONS
) -> ConcentrationReport:
    """All concentration statistics for one mention-count vector."""
    fit = powerlaw_fit(counts)
    return ConcentrationReport(
        gini=gini(counts),
        lorenz_points=lorenz(counts),
        top_shares={f: top_share(counts, f) for f in fractions},
        powerlaw_slope=fit[0] if fit else None,
        powerlaw_r2=fit[1] if fit else None,
    )


def loglog_points(counts) -> list[tuple[int, float, float, float]]:
    """(rank, count, log10 rank, log10 count) rows for the log-log panel."""
    arr = _as_counts(counts)
    positive = np.sort(arr[arr > 0])[::-1]
    return [
        (rank, float(value), float(np.log10(rank)), float(np.log10(value)))
        for rank, value in enumerate(positive, start=1)
    ]


def histogram_bins(counts, n_bins: int = 20) -> list[tuple[float, float, int]]:
    """Log-spaced histogram rows (bin_low, bin_high, count) over positives.

    A leading (0, 0, n_zero) row carries the zero-count domains so the
    distribution panel can show them separately from the log-scale bins.
    """
    arr = _as_counts(counts)
    positive = arr[arr > 0]
    rows: list[tuple[float, float, int]] = []
    n_zero = int((arr == 0).sum())
    if n_zero:
        rows.append((0.0, 0.0, n_zero))
    if positive.size == 0:
        return rows
    low, high = positive.min(), positive.max()
    if low == high:
        return rows + [(float(low), float(high), int(positive.size))]
    edges = np.logspace(np.log10(low), np.log10(high), n_bins + 1)
    hist, _ = np.histogram(positive, bins=edges)
    rows.extend(
        (float(edges[i]), float(edges[i + 1]), int(hist[i])) for i in range(n_bins)
    )
    return rows
