"""Bias and fairness audit engine for LLM use cases.

Evaluates generated outputs alone: builds counterfactual prompt/output
pairs, computes toxicity, stereotype, counterfactual, classification, and
recommendation fairness metrics, and encodes the decision rules that pick
which metrics a use case needs.
"""

from .audit import AuditConfig, run_audit
from .core import (
    CounterfactualPair,
    FtuReport,
    LexiconSet,
    Prompt,
    UseCaseProfile,
    default_lexicons,
    ftu_check,
    generate_counterfactual_pairs,
    load_lexicons,
    mask_protected_words,
    tokenize,
)
from .framework import MetricPlan, recommend_metrics
from .report import AuditReport, MetricResult, canonical_json, render_text

__version__ = "0.1.0"

__all__ = [
    "AuditConfig",
    "run_audit",
    "CounterfactualPair",
    "FtuReport",
    "LexiconSet",
    "Prompt",
    "UseCaseProfile",
    "default_lexicons",
    "ftu_check",
    "generate_counterfactual_pairs",
    "load_lexicons",
    "mask_protected_words",
    "tokenize",
    "MetricPlan",
    "recommend_metrics",
    "AuditReport",
    "MetricResult",
    "canonical_json",
    "render_text",
    "__version__",
]
