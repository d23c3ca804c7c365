"""Roster, traction, and mention-count ingestion.

Mention counts come from a search-results API behind an injectable
transport, with a disk cache keyed by (query, window) and a global
sliding-window rate limit. A collection run never discards completed work:
successful records are returned together with per-domain errors and the
caller decides how to signal partial failure.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Callable, Protocol

import requests

from .io import observation_from_dict, parse_timestamp, read_domain_lines, read_roster_csv
from .models import (
    ConfigurationError,
    LoadError,
    MentionRecord,
    ScoringConfig,
    SignalObservation,
    StartupRecord,
    stable_hash,
)

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "YCBENCH_SEARCH_API_KEY"

# Collection windows used by the shipped W26 instance: the batch window runs
# from batch publication to the eve of Demo Day; the pre-application window
# ends before the application deadline so the signal carries no
# accelerator-related exposure.
BATCH_WINDOW_W26 = ("batch", date(2026, 1, 1), date(2026, 3, 17))
PRE_APPLICATION_WINDOW_W26 = ("pre_application", date(2025, 8, 17), date(2025, 10, 31))


@dataclass(frozen=True)
class CollectionWindow:
    label: str
    start: date
    end: date

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"window start must precede end ({self.start} >= {self.end})")


@dataclass(frozen=True)
class CollectorSettings:
    cache_dir: Path
    max_requests_per_second: float = 5.0
    max_retries: int = 3
    api_key_env_name: str = DEFAULT_API_KEY_ENV
    max_concurrency: int = 1

    def __post_init__(self) -> None:
        if self.max_requests_per_second <= 0:
            raise ConfigurationError("max_requests_per_second must be > 0")
        if self.max_retries < 0:
            raise ConfigurationError("max_retries must be >= 0")
        if self.max_concurrency < 1:
            raise ConfigurationError("max_concurrency must be >= 1")


# -- roster and traction files --------------------------------------------


def load_roster(path: str | Path) -> list[StartupRecord]:
    """Load a roster CSV, preserving file order; duplicate domains are an error."""
    records = read_roster_csv(path)
    seen: dict[str, int] = {}
    for idx, rec in enumerate(records, start=2):
        if rec.domain in seen:
            raise LoadError(
                f"{path}: duplicate domain {rec.domain!r} on rows "
                f"{seen[rec.domain]} and {idx}"
            )
        seen[rec.domain] = idx
    return records


def apply_exclusions(
    roster: list[StartupRecord], blocklist: list[str]
) -> list[StartupRecord]:
    """Flag roster records whose domain matches any blocklist pattern.

    Patterns are exact domains or fnmatch-style globs. Matching records get
    excluded=True plus an auditable reason; everything else is returned
    untouched, so the roster size is conserved.
    """
    from fnmatch import fnmatch

    out = []
    for rec in roster:
        matched = next((p for p in blocklist if fnmatch(rec.domain, p)), None)
        if matched is not None and not rec.excluded:
            out.append(
                StartupRecord(
                    name=rec.name,
                    domain=rec.domain,
                    batch=rec.batch,
                    one_liner=rec.one_liner,
                    excluded=True,
                    exclusion_reason=f"blocklist match: {matched}",
                )
            )
        else:
            out.append(rec)
    return out


def load_blocklist(path: str | Path) -> list[str]:
    return read_domain_lines(path)


def load_traction(
    path: str | Path,
    roster: list[StartupRecord] | None = None,
    config: ScoringConfig | None = None,
) -> list[SignalObservation]:
    """Load a traction JSONL file of one observation per line.

    With a roster, every observation domain must resolve to a known record;
    with a config, every unit tag must have a divisor. Violations report the
    offending line number.
    """
    path = Path(path)
    known = {r.domain for r in roster} if roster is not None else None
    observations: list[SignalObservation] = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obs = observation_from_dict(json.loads(line))
                if known is not None and obs.domain not in known:
                    raise LoadError(f"domain {obs.domain!r} not in roster")
                if config is not None and obs.unit not in config.unit_divisors:
                    raise LoadError(
                        f"unknown unit tag {obs.unit!r}; "
                        f"known units: {sorted(config.unit_divisors)}"
                    )
            except LoadError as exc:
                raise LoadError(f"{path}:{line_no}: {exc}") from None
            except (ValueError, KeyError, TypeError) as exc:
                raise LoadError(f"{path}:{line_no}: bad observation: {exc}") from None
            observations.append(obs)
    return observations


# -- search transport ------------------------------------------------------


class SearchTransport(Protocol):
    """Anything that can answer "how many results for this query/window"."""

    def fetch_total_results(
        self, query: str, window: CollectionWindow, api_key: str
    ) -> int: ...


class SerpApiTransport:
    """Search-results provider client; reports the total-results estimate.

    The windowed restriction uses the provider's custom date-range
    parameters rather than paging through results.
    """

    BASE_URL = "https://serpapi.com/search.json"

    def __init__(self, session: requests.Session | None = None, timeout: float = 20.0):
        self._session = session or requests.Session()
        self._timeout = timeout

    def fetch_total_results(
        self, query: str, window: CollectionWindow, api_key: str
    ) -> int:
        params = {
            "engine": "google",
            "q": query,
            "api_key": api_key,
            "num": "10",
            "tbs": (
                f"cdr:1,cd_min:{window.start.month}/{window.start.day}/{window.start.year},"
                f"cd_max:{window.end.month}/{window.end.day}/{window.end.year}"
            ),
        }
        response = self._session.get(self.BASE_URL, params=params, timeout=self._timeout)
        if response.status_code == 429 or response.status_code >= 500:
            raise TransportError(f"provider returned HTTP {response.status_code}")
        response.raise_for_status()
        data = response.json()
        if "error" in data:
            # Provider reports "no results" as an error string, not a count.
            message = str(data["error"])
            if "hasn't returned any results" in message.lower():
                return 0
            raise TransportError(message)
        info = data.get("search_information", {})
        return int(info.get("total_results", 0))


class TransportError(RuntimeError):
    """Retryable provider failure (quota, 5xx, malformed payload)."""


class RateLimiter:
    """Sliding-window limiter: at most floor(rps) sends in any 1 s window.

    For fractional rates below one, consecutive sends are spaced 1/rps
    seconds apart. Thread-safe; the clock and sleep are injectable so tests
    can run without waiting.
    """

    def __init__(
        self,
        max_per_second: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_per_second <= 0:
            raise ValueError("max_per_second must be > 0")
        self._capacity = int(max_per_second) if max_per_second >= 1 else 1
        self._min_spacing = 0.0 if max_per_second >= 1 else 1.0 / max_per_second
        self._clock = clock
        self._sleep = sleep
        self._sent: deque[float] = deque()
        self._last_send: float | None = None
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._sent and now - self._sent[0] >= 1.0:
                    self._sent.popleft()
                spacing_ok = (
                    not self._min_spacing
                    or self._last_send is None
                    or now - self._last_send >= self._min_spacing
                )
                if spacing_ok and len(self._sent) < self._capacity:
                    self._sent.append(now)
                    self._last_send = now
                    return
                waits = [1e-4]
                if len(self._sent) >= self._capacity:
                    waits.append(self._sent[0] + 1.0 - now)
                if self._min_spacing and self._last_send is not None:
                    waits.append(self._last_send + self._min_spacing - now)
                wait = max(waits)
            self._sleep(wait)


# -- mention collection ----------------------------------------------------


@dataclass
class CollectionResult:
    records: list[MentionRecord]
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.errors


def mention_query(domain: str) -> str:
    """The exact provider query for one domain: the bare domain, quoted."""
    return f'"{domain}"'


def cache_path(cache_dir: Path, query: str, window: CollectionWindow) -> Path:
    key = stable_hash(
        {
            "query": query,
            "window_start": window.start.isoformat(),
            "window_end": window.end.isoformat(),
        }
    )
    return cache_dir / f"{key[:24]}.json"


def write_cache_entry(
    cache_dir: Path,
    query: str,
    window: CollectionWindow,
    total_results: int,
    retrieved_at: datetime,
) -> Path:
    """Persist one provider answer; the atomic rename keeps readers safe."""
    path = cache_path(cache_dir, query, window)
    payload = {
        "query": query,
        "window_start": window.start.isoformat(),
        "window_end": window.end.isoformat(),
        "total_results": total_results,
        "retrieved_at": retrieved_at.astimezone(timezone.utc).isoformat().replace("+00:00", "Z"),
    }
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


def _read_cache_entry(path: Path) -> tuple[int, datetime] | None:
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return int(data["total_results"]), parse_timestamp(str(data["retrieved_at"]))
    except (ValueError, KeyError) as exc:
        log.warning("discarding unreadable cache entry %s: %s", path, exc)
        return None


def collect_mentions(
    domains: list[str],
    window: CollectionWindow,
    settings: CollectorSettings,
    transport: SearchTransport | None = None,
    retry_sleep: Callable[[float], None] = time.sleep,
) -> CollectionResult:
    """Collect one windowed mention count per domain, cache-first.

    Cache hits cost nothing; only misses touch the network, which requires
    the API key named by the settings to be present in the environment. The
    check happens up front so a run never fails halfway for a reason known
    at the start. Per-domain failures after retries are recorded and the
    remaining domains still run.
    """
    unique_domains = list(dict.fromkeys(domains))
    cache_dir = Path(settings.cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)

    cached: dict[str, tuple[int, datetime]] = {}
    misses: list[str] = []
    for domain in unique_domains:
        entry = _read_cache_entry(cache_path(cache_dir, mention_query(domain), window))
        if entry is None:
            misses.append(domain)
        else:
            cached[domain] = entry

    api_key = os.environ.get(settings.api_key_env_name, "")
    if misses and not api_key:
        raise ConfigurationError(
            f"{len(misses)} domains need collection but the API key environment "
            f"variable {settings.api_key_env_name!r} is not set"
        )

    errors: dict[str, str] = {}
    if misses:
        if transport is None:
            transport = SerpApiTransport()
        limiter = RateLimiter(settings.max_requests_per_second)

        def fetch(domain: str) -> None:
            query = mention_query(domain)
            last_error = "unknown"
            for attempt in range(settings.max_retries + 1):
                if attempt:
                    retry_sleep(min(2.0 ** attempt * 0.5, 8.0))
                limiter.acquire()
                try:
                    count = transport.fetch_total_results(query, window, api_key)
                except (TransportError, requests.RequestException) as exc:
                    last_error = str(exc)
                    log.warning(
                        "fetch failed for %s (attempt %d/%d): %s",
                        domain, attempt + 1, settings.max_retries + 1, exc,
                    )
                    continue
                retrieved_at = datetime.now(timezone.utc)
                write_cache_entry(cache_dir, query, window, count, retrieved_at)
                cached[domain] = (count, retrieved_at)
                return
            errors[domain] = last_error

        if settings.max_concurrency > 1:
            with ThreadPoolExecutor(max_workers=settings.max_concurrency) as pool:
                list(pool.map(fetch, misses))
        else:
            for domain in misses:
                fetch(domain)

    records = [
        MentionRecord(
            domain=domain,
            window_start=window.start,
            window_end=window.end,
            count=cached[domain][0],
            query=mention_query(domain),
            retrieved_at=cached[domain][1],
        )
        for domain in unique_domains
        if domain in cached
    ]
    return CollectionResult(records=records, errors=errors)
