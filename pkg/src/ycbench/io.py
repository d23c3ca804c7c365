"""Readers and writers for every file format the harness exchanges.

Formats:
  - roster CSV:    name,domain,batch,one_liner,excluded,exclusion_reason
  - traction JSONL: one SignalObservation object per line
  - mentions JSONL: one MentionRecord object per line
  - config file:    flat ``key = value`` text, ``#`` comments
  - submission JSON, truth JSON, report JSON
  - scores JSONL + leaderboard CSV

Writers are deterministic: fixed key order, ``\\n`` newlines, no embedded
wall-clock timestamps. Byte-identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from .models import (
    Driver,
    LoadError,
    MentionRecord,
    PredictionSubmission,
    ScoreBreakdown,
    ScoringConfig,
    SignalKind,
    SignalObservation,
    StartupRecord,
)

ROSTER_COLUMNS = ["name", "domain", "batch", "one_liner", "excluded", "exclusion_reason"]


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp, accepting a trailing ``Z``."""
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _parse_bool(raw: str, context: str) -> bool:
    norm = raw.strip().lower()
    if norm in ("true", "1", "yes"):
        return True
    if norm in ("false", "0", "no", ""):
        return False
    raise LoadError(f"{context}: cannot parse boolean from {raw!r}")


# -- roster CSV ----------------------------------------------------------


def read_roster_csv(path: str | Path) -> list[StartupRecord]:
    """Parse a roster CSV, preserving file order.

    Malformed rows raise LoadError with the 1-based row number. Domains are
    normalized to lowercase before validation.
    """
    path = Path(path)
    records: list[StartupRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ROSTER_COLUMNS:
            raise LoadError(
                f"{path}: expected header {','.join(ROSTER_COLUMNS)}, "
                f"got {reader.fieldnames}"
            )
        for row_no, row in enumerate(reader, start=2):
            try:
                if any(v is None for v in row.values()) or None in row:
                    raise ValueError("wrong number of fields")
                records.append(
                    StartupRecord(
                        name=row["name"].strip(),
                        domain=row["domain"].strip().lower(),
                        batch=row["batch"].strip(),
                        one_liner=row["one_liner"].strip() or None,
                        excluded=_parse_bool(row["excluded"], f"{path}:{row_no}"),
                        exclusion_reason=row["exclusion_reason"].strip() or None,
                    )
                )
            except (ValueError, KeyError) as exc:
                raise LoadError(f"{path}:{row_no}: {exc}") from None
    return records


def write_roster_csv(path: str | Path, roster: Iterable[StartupRecord]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROSTER_COLUMNS)
        for rec in roster:
            writer.writerow(
                [
                    rec.name,
                    rec.domain,
                    rec.batch,
                    rec.one_liner or "",
                    "true" if rec.excluded else "false",
                    rec.exclusion_reason or "",
                ]
            )


# -- traction JSONL ------------------------------------------------------


def observation_to_dict(obs: SignalObservation) -> dict[str, Any]:
    out: dict[str, Any] = {
        "domain": obs.domain,
        "kind": obs.kind.name,
        "raw_value": obs.raw_value,
        "unit": obs.unit,
        "as_of": obs.as_of.isoformat(),
        "source": obs.source,
    }
    if obs.mom_growth is not None:
        out["mom_growth"] = obs.mom_growth
    return out


def observation_from_dict(data: dict[str, Any]) -> SignalObservation:
    kind_raw = str(data["kind"])
    try:
        kind = SignalKind[kind_raw.upper()]
    except KeyError:
        raise LoadError(
            f"unknown signal kind {kind_raw!r}; "
            f"known kinds: {[k.name for k in SignalKind]}"
        ) from None
    growth = data.get("mom_growth")
    return SignalObservation(
        domain=str(data["domain"]).lower(),
        kind=kind,
        raw_value=float(data["raw_value"]),
        unit=str(data["unit"]),
        as_of=date.fromisoformat(str(data["as_of"])),
        source=str(data["source"]),
        mom_growth=None if growth is None else float(growth),
    )


# -- mentions JSONL ------------------------------------------------------


def mention_to_dict(rec: MentionRecord) -> dict[str, Any]:
    return {
        "domain": rec.domain,
        "window_start": rec.window_start.isoformat(),
        "window_end": rec.window_end.isoformat(),
        "count": rec.count,
        "query": rec.query,
        "retrieved_at": format_timestamp(rec.retrieved_at),
    }


def mention_from_dict(data: dict[str, Any]) -> MentionRecord:
    return MentionRecord(
        domain=str(data["domain"]).lower(),
        window_start=date.fromisoformat(str(data["window_start"])),
        window_end=date.fromisoformat(str(data["window_end"])),
        count=int(data["count"]),
        query=str(data["query"]),
        retrieved_at=parse_timestamp(str(data["retrieved_at"])),
    )


def read_jsonl(path: str | Path, from_dict, what: str) -> list[Any]:
    """Read one record per line via ``from_dict``; errors carry line numbers."""
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(from_dict(json.loads(line)))
            except LoadError as exc:
                raise LoadError(f"{path}:{line_no}: {exc}") from None
            except (ValueError, KeyError, TypeError) as exc:
                raise LoadError(f"{path}:{line_no}: bad {what} record: {exc}") from None
    return records


def write_jsonl(path: str | Path, dicts: Iterable[dict[str, Any]]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for item in dicts:
            fh.write(json.dumps(item, separators=(", ", ": ")))
            fh.write("\n")


def read_mentions_jsonl(path: str | Path) -> list[MentionRecord]:
    return read_jsonl(path, mention_from_dict, "mention")


def write_mentions_jsonl(path: str | Path, records: Iterable[MentionRecord]) -> None:
    write_jsonl(path, (mention_to_dict(r) for r in records))


# -- config file ---------------------------------------------------------

_WEIGHT_PREFIX = "weight."
_DIVISOR_PREFIX = "unit_divisor."
_SCALAR_KEYS = {
    "attention_weight",
    "velocity_coefficient",
    "apply_velocity_only_when_positive",
    "top_fraction",
}


def read_config_file(path: str | Path) -> ScoringConfig:
    """Parse a flat key/value config file on top of the shipped defaults.

    Recognized keys: ``weight.<signal>``, ``unit_divisor.<unit>``, and the
    scalar knobs (attention_weight, velocity_coefficient,
    apply_velocity_only_when_positive, top_fraction). Unknown keys are a
    load error naming the line.
    """
    path = Path(path)
    config = ScoringConfig()
    weights = dict(config.weights)
    divisors = dict(config.unit_divisors)
    scalars: dict[str, Any] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise LoadError(f"{path}:{line_no}: expected 'key = value', got {line.strip()!r}")
            key, _, raw = text.partition("=")
            key, raw = key.strip(), raw.strip()
            try:
                if key.startswith(_WEIGHT_PREFIX):
                    kind_name = key[len(_WEIGHT_PREFIX):].upper()
                    try:
                        kind = SignalKind[kind_name]
                    except KeyError:
                        raise ValueError(f"unknown signal kind {kind_name!r}") from None
                    weights[kind] = float(raw)
                elif key.startswith(_DIVISOR_PREFIX):
                    divisors[key[len(_DIVISOR_PREFIX):]] = float(raw)
                elif key == "apply_velocity_only_when_positive":
                    scalars[key] = _parse_bool(raw, key)
                elif key in _SCALAR_KEYS:
                    scalars[key] = float(raw)
                else:
                    raise ValueError(f"unknown config key {key!r}")
            except ValueError as exc:
                raise LoadError(f"{path}:{line_no}: {exc}") from None
    return ScoringConfig(weights=weights, unit_divisors=divisors, **scalars)


def write_config_file(path: str | Path, config: ScoringConfig) -> None:
    lines = ["# scoring configuration"]
    for kind in SignalKind:
        if kind in config.weights:
            lines.append(f"weight.{kind.name.lower()} = {config.weights[kind]}")
    for unit in sorted(config.unit_divisors):
        lines.append(f"unit_divisor.{unit} = {config.unit_divisors[unit]}")
    lines.append(f"attention_weight = {config.attention_weight}")
    lines.append(f"velocity_coefficient = {config.velocity_coefficient}")
    lines.append(
        "apply_velocity_only_when_positive = "
        + ("true" if config.apply_velocity_only_when_positive else "false")
    )
    lines.append(f"top_fraction = {config.top_fraction}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- submission JSON -----------------------------------------------------


def submission_to_dict(sub: PredictionSubmission) -> dict[str, Any]:
    return {
        "predictor_name": sub.predictor_name,
        "batch": sub.batch,
        "created_at": format_timestamp(sub.created_at),
        "ranked_domains": list(sub.ranked_domains),
    }


def submission_from_dict(data: dict[str, Any]) -> PredictionSubmission:
    return PredictionSubmission(
        predictor_name=str(data["predictor_name"]),
        batch=str(data["batch"]),
        created_at=parse_timestamp(str(data["created_at"])),
        ranked_domains=tuple(str(d).lower() for d in data["ranked_domains"]),
    )


def read_submission_json(path: str | Path) -> PredictionSubmission:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return submission_from_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise LoadError(f"{path}: bad submission: {exc}") from None


def write_submission_json(path: str | Path, sub: PredictionSubmission) -> None:
    write_json(path, submission_to_dict(sub))


def write_json(path: str | Path, payload: Any) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )


# -- score breakdowns ----------------------------------------------------


def breakdown_to_dict(b: ScoreBreakdown) -> dict[str, Any]:
    return {
        "domain": b.domain,
        "traction_score": b.traction_score,
        "dominant_signal": b.dominant_signal.name if b.dominant_signal else None,
        "velocity_multiplier_applied": b.velocity_multiplier_applied,
        "attention_score": b.attention_score,
        "pre_demo_day_score": b.pre_demo_day_score,
        "driver": b.driver.name,
    }


def breakdown_from_dict(data: dict[str, Any]) -> ScoreBreakdown:
    traction = data["traction_score"]
    dominant = data["dominant_signal"]
    return ScoreBreakdown(
        domain=str(data["domain"]).lower(),
        traction_score=None if traction is None else float(traction),
        dominant_signal=None if dominant is None else SignalKind[str(dominant)],
        velocity_multiplier_applied=float(data["velocity_multiplier_applied"]),
        attention_score=float(data["attention_score"]),
        pre_demo_day_score=float(data["pre_demo_day_score"]),
        driver=Driver[str(data["driver"])],
    )


def read_scores_jsonl(path: str | Path) -> list[ScoreBreakdown]:
    return read_jsonl(path, breakdown_from_dict, "score breakdown")


def write_scores_jsonl(path: str | Path, breakdowns: Iterable[ScoreBreakdown]) -> None:
    write_jsonl(path, (breakdown_to_dict(b) for b in breakdowns))


def write_leaderboard_csv(path: str | Path, breakdowns: Iterable[ScoreBreakdown]) -> None:
    """Plot-ready leaderboard: rank,domain,score,driver,dominant_signal."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "domain", "score", "driver", "dominant_signal"])
        for rank, b in enumerate(breakdowns, start=1):
            writer.writerow(
                [
                    rank,
                    b.domain,
                    repr(b.pre_demo_day_score),
                    b.driver.name,
                    b.dominant_signal.name if b.dominant_signal else "",
                ]
            )


# -- plain domain lists (blocklist, high-traction set) --------------------


def read_domain_lines(path: str | Path) -> list[str]:
    """One domain (or pattern) per line; ``#`` starts a comment."""
    out: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        text = line.split("#", 1)[0].strip().lower()
        if text:
            out.append(text)
    return out


def csv_bytes(rows: Iterable[Iterable[Any]]) -> bytes:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(list(row))
    return buf.getvalue().encode("utf-8")
