"""Benchmark harness for forecasting early outperformance in accelerator batches."""

from .analytics import ConcentrationReport, concentration_report, gini, lorenz, powerlaw_fit, top_share
from .baseline import BASELINE_PREDICTOR_NAME, BaselineRun, baseline_predict
from .evaluation import (
    EvaluationReport,
    ResolvedTruth,
    evaluate_submission,
    lift_over_random,
    precision_at_k,
    recall_at_m,
    resolve_truth,
)
from .ingest import (
    CollectionWindow,
    CollectorSettings,
    apply_exclusions,
    collect_mentions,
    load_blocklist,
    load_roster,
    load_traction,
)
from .models import (
    ConfigurationError,
    Driver,
    LoadError,
    MentionRecord,
    PredictionSubmission,
    ScoreBreakdown,
    ScoringConfig,
    SignalKind,
    SignalObservation,
    StartupRecord,
    config_fingerprint,
    normalize_value,
    validate_config,
)
from .scoring import BatchScores, attention_score, pre_demo_day_score, score_batch, traction_score

__version__ = "0.1.0"
