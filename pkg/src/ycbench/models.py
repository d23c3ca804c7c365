"""Shared domain types, the configurable scoring schema, and validation.

Everything here is an immutable value object; operations are pure functions.
All other modules depend on this one and it depends on nothing else in the
package.
"""

from __future__ import annotations

import enum
import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime


class LoadError(ValueError):
    """Raised when an input file fails to parse or validate.

    The message carries file/line context so CLI users can find the
    offending row.
    """


class ConfigurationError(ValueError):
    """Raised for bad runtime configuration (settings, missing API key)."""


class SignalKind(enum.Enum):
    """Closed set of disclosed traction signal kinds.

    Unknown kinds in input files are a load error, never coerced.
    """

    ARR_REVENUE = "ARR_REVENUE"
    PILOT_REVENUE = "PILOT_REVENUE"
    LOI_SIGNED_CONTRACTS = "LOI_SIGNED_CONTRACTS"
    ACTIVE_USERS = "ACTIVE_USERS"
    ACTIVITY_VOLUME = "ACTIVITY_VOLUME"
    SIGNUPS = "SIGNUPS"
    ECOSYSTEM_PULL = "ECOSYSTEM_PULL"


class Driver(enum.Enum):
    """Which component of the combined score won the max."""

    TRACTION = "TRACTION"
    ATTENTION = "ATTENTION"


# Default signal weights: revenue dominates, engagement follows,
# acquisition-funnel signals are discounted.
DEFAULT_WEIGHTS: dict[SignalKind, float] = {
    SignalKind.ARR_REVENUE: 1.00,
    SignalKind.PILOT_REVENUE: 0.50,
    SignalKind.LOI_SIGNED_CONTRACTS: 0.20,
    SignalKind.ACTIVE_USERS: 0.40,
    SignalKind.ACTIVITY_VOLUME: 0.25,
    SignalKind.SIGNUPS: 0.15,
    SignalKind.ECOSYSTEM_PULL: 0.10,
}

# Shipped unit divisors: dollar amounts score in $K, people/event counts
# score in hundreds. Keeps revenue and engagement at comparable magnitudes
# (a 500-mention attention tier lands near a $25K pilot-revenue traction
# score). Override or extend via the config file.
DEFAULT_UNIT_DIVISORS: dict[str, float] = {
    "usd": 1000.0,
    "count": 100.0,
}


def _check_domain(domain: str) -> None:
    if not domain:
        raise ValueError("domain must be non-empty")
    if domain != domain.lower():
        raise ValueError(f"domain must be lowercase: {domain!r}")
    if "." not in domain:
        raise ValueError(f"domain must contain a dot: {domain!r}")
    if any(ch.isspace() for ch in domain):
        raise ValueError(f"domain must not contain whitespace: {domain!r}")


@dataclass(frozen=True)
class StartupRecord:
    """One batch company, keyed by its registrable domain."""

    name: str
    domain: str
    batch: str
    one_liner: str | None = None
    excluded: bool = False
    exclusion_reason: str | None = None

    def __post_init__(self) -> None:
        _check_domain(self.domain)
        if self.excluded and not self.exclusion_reason:
            raise ValueError(
                f"excluded record {self.domain!r} requires an exclusion_reason"
            )


@dataclass(frozen=True)
class SignalObservation:
    """One disclosed traction datum for a startup.

    ``raw_value`` is in the unit disclosed (tagged by ``unit``); ``mom_growth``
    is fractional month-over-month growth (0.5 means +50%).
    """

    domain: str
    kind: SignalKind
    raw_value: float
    unit: str
    as_of: date
    source: str
    mom_growth: float | None = None

    def __post_init__(self) -> None:
        _check_domain(self.domain)
        if self.raw_value < 0:
            raise ValueError(f"raw_value must be >= 0, got {self.raw_value}")
        if self.mom_growth is not None and self.mom_growth <= -1:
            raise ValueError(f"mom_growth must be > -1, got {self.mom_growth}")


@dataclass(frozen=True)
class MentionRecord:
    """Windowed web-mention count for one domain.

    ``query`` is the exact query string issued to the search provider, kept
    for auditability.
    """

    domain: str
    window_start: date
    window_end: date
    count: int
    query: str
    retrieved_at: datetime

    def __post_init__(self) -> None:
        _check_domain(self.domain)
        if self.window_start >= self.window_end:
            raise ValueError(
                f"window_start must precede window_end "
                f"({self.window_start} >= {self.window_end})"
            )
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")


@dataclass(frozen=True)
class ScoringConfig:
    """All knobs of the combined score.

    combined = max(traction, attention) where
        traction  = max_k(weights[k] * value_k / unit_divisors[unit_k]),
                    optionally scaled by (1 + velocity_coefficient * growth)
        attention = attention_weight * mention_count
    """

    weights: dict[SignalKind, float] = field(
        default_factory=lambda: dict(DEFAULT_WEIGHTS)
    )
    unit_divisors: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_UNIT_DIVISORS)
    )
    attention_weight: float = 0.05
    velocity_coefficient: float = 10.0
    apply_velocity_only_when_positive: bool = True
    top_fraction: float = 0.10


def validate_config(config: ScoringConfig) -> list[str]:
    """Return a list of invariant violations, each naming the offending field.

    An empty list means the config is valid. Reports, never raises.
    """
    violations: list[str] = []
    for kind in SignalKind:
        if kind not in config.weights:
            violations.append(f"weights: missing entry for {kind.name}")
        elif not config.weights[kind] > 0:
            violations.append(
                f"weights[{kind.name}] must be > 0, got {config.weights[kind]}"
            )
    for kind in config.weights:
        if not isinstance(kind, SignalKind):
            violations.append(f"weights: unknown signal kind {kind!r}")
    for unit, divisor in config.unit_divisors.items():
        if not divisor > 0:
            violations.append(f"unit_divisors[{unit!r}] must be > 0, got {divisor}")
    if not config.attention_weight > 0:
        violations.append(
            f"attention_weight must be > 0, got {config.attention_weight}"
        )
    if not 0 < config.top_fraction <= 1:
        violations.append(
            f"top_fraction must be in (0, 1], got {config.top_fraction}"
        )
    return violations


def normalize_value(obs: SignalObservation, config: ScoringConfig) -> float:
    """Normalized signal value: raw_value / unit_divisors[unit].

    Unknown unit tags are a load-time error naming the tag.
    """
    try:
        divisor = config.unit_divisors[obs.unit]
    except KeyError:
        raise LoadError(
            f"unknown unit tag {obs.unit!r} for domain {obs.domain!r}; "
            f"known units: {sorted(config.unit_divisors)}"
        ) from None
    return obs.raw_value / divisor


@dataclass(frozen=True)
class ScoreBreakdown:
    """Per-startup score components with provenance.

    ``traction_score`` is None when the startup disclosed nothing (distinct
    from a disclosed zero). ``velocity_multiplier_applied`` is 1.0 when no
    growth multiplier fired.
    """

    domain: str
    traction_score: float | None
    dominant_signal: SignalKind | None
    velocity_multiplier_applied: float
    attention_score: float
    pre_demo_day_score: float
    driver: Driver

    def __post_init__(self) -> None:
        _check_domain(self.domain)
        expected = max(self.traction_score or 0.0, self.attention_score)
        if self.pre_demo_day_score != expected:
            raise ValueError(
                f"pre_demo_day_score must equal max(traction or 0, attention): "
                f"{self.pre_demo_day_score} != {expected}"
            )
        traction_wins = (
            self.traction_score is not None
            and self.traction_score >= self.attention_score
        )
        expected_driver = Driver.TRACTION if traction_wins else Driver.ATTENTION
        if self.driver is not expected_driver:
            raise ValueError(
                f"driver must be {expected_driver.name} for "
                f"traction={self.traction_score} attention={self.attention_score}"
            )


@dataclass(frozen=True)
class PredictionSubmission:
    """A participant's ranked guess at the batch's top decile."""

    predictor_name: str
    batch: str
    created_at: datetime
    ranked_domains: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.ranked_domains)) != len(self.ranked_domains):
            counts = Counter(self.ranked_domains)
            dupes = sorted(d for d, n in counts.items() if n > 1)
            raise ValueError(f"ranked_domains contains duplicates: {dupes}")
        for domain in self.ranked_domains:
            _check_domain(domain)


def config_fingerprint(config: ScoringConfig) -> str:
    """Stable 12-hex-char hash of a scoring config.

    Key order is canonicalized so equal configs always fingerprint equal.
    """
    payload = {
        "weights": {k.name: v for k, v in sorted(config.weights.items(), key=lambda kv: kv[0].name)},
        "unit_divisors": dict(sorted(config.unit_divisors.items())),
        "attention_weight": config.attention_weight,
        "velocity_coefficient": config.velocity_coefficient,
        "apply_velocity_only_when_positive": config.apply_velocity_only_when_positive,
        "top_fraction": config.top_fraction,
    }
    return stable_hash(payload)[:12]


def stable_hash(payload: object) -> str:
    """SHA-256 hex digest of a JSON-serializable payload, key-order stable."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
