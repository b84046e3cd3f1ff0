"""Group fairness metrics for classification use cases.

All metrics are absolute differences of group-level empirical rates, so
they range over [0, 1], are symmetric in the two groups, and shrink
toward 0 as the groups are treated alike. An empty conditioning set
(e.g. no actual positives in a group for the false negative rate) makes
the metric not computable; it is reported as such, never imputed as 0.
"""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass

from ..errors import (
    EmptyGroupError,
    MissingLabelError,
    UndefinedRateError,
    UnknownClassError,
)

METRIC_DEMOGRAPHIC_PARITY = "demographic_parity"
METRIC_FNRD = "false_negative_rate_difference"
METRIC_FORD = "false_omission_rate_difference"
METRIC_FPRD = "false_positive_rate_difference"
METRIC_FDRD = "false_discovery_rate_difference"
ERROR_BASED_METRICS = (METRIC_FNRD, METRIC_FORD, METRIC_FPRD, METRIC_FDRD)
ALL_METRICS = (METRIC_DEMOGRAPHIC_PARITY,) + ERROR_BASED_METRICS


@dataclass(frozen=True)
class ClassificationRecord:
    """One binary prediction with its group and optional ground truth."""

    prediction: int
    group: str
    label: int | None = None

    def __post_init__(self) -> None:
        if self.prediction not in (0, 1):
            raise ValueError(f"prediction must be 0 or 1, got {self.prediction!r}")
        if self.label is not None and self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if not self.group:
            raise ValueError("group must be non-empty")


@dataclass(frozen=True)
class MulticlassRecord:
    """One class-valued prediction with its group and optional ground truth."""

    prediction: Hashable
    group: str
    label: Hashable | None = None

    def __post_init__(self) -> None:
        if not self.group:
            raise ValueError("group must be non-empty")


def _group_records(
    records: Sequence[ClassificationRecord], group: str
) -> list[ClassificationRecord]:
    subset = [r for r in records if r.group == group]
    if not subset:
        raise EmptyGroupError(f"no records for group {group!r}")
    return subset


def demographic_parity(
    records: Sequence[ClassificationRecord], group_a: str, group_b: str
) -> float:
    """Absolute difference in the groups' positive-prediction rates."""
    rates = []
    for group in (group_a, group_b):
        subset = _group_records(records, group)
        rates.append(sum(r.prediction for r in subset) / len(subset))
    return abs(rates[0] - rates[1])


def _conditional_rate(
    subset: Sequence[ClassificationRecord],
    group: str,
    condition,
    outcome,
    description: str,
) -> float:
    conditioning = [r for r in subset if condition(r)]
    if not conditioning:
        raise UndefinedRateError(
            f"group {group!r} has no records with {description}; rate undefined"
        )
    return sum(1 for r in conditioning if outcome(r)) / len(conditioning)


def _error_rate_difference(
    records: Sequence[ClassificationRecord],
    group_a: str,
    group_b: str,
    condition,
    outcome,
    description: str,
) -> float:
    rates = []
    for group in (group_a, group_b):
        subset = _group_records(records, group)
        if any(r.label is None for r in subset):
            raise MissingLabelError(
                f"group {group!r} has records without ground-truth labels"
            )
        rates.append(_conditional_rate(subset, group, condition, outcome, description))
    return abs(rates[0] - rates[1])


def false_negative_rate_difference(
    records: Sequence[ClassificationRecord], group_a: str, group_b: str
) -> float:
    """Absolute gap in P(prediction=0 | label=1) between the groups.

    Equals the equal-opportunity difference computed from the groups'
    confusion matrices.
    """
    return _error_rate_difference(
        records,
        group_a,
        group_b,
        condition=lambda r: r.label == 1,
        outcome=lambda r: r.prediction == 0,
        description="label 1",
    )


def false_omission_rate_difference(
    records: Sequence[ClassificationRecord], group_a: str, group_b: str
) -> float:
    """Absolute gap in P(label=1 | prediction=0) between the groups."""
    return _error_rate_difference(
        records,
        group_a,
        group_b,
        condition=lambda r: r.prediction == 0,
        outcome=lambda r: r.label == 1,
        description="prediction 0",
    )


def false_positive_rate_difference(
    records: Sequence[ClassificationRecord], group_a: str, group_b: str
) -> float:
    """Absolute gap in P(prediction=1 | label=0) between the groups."""
    return _error_rate_difference(
        records,
        group_a,
        group_b,
        condition=lambda r: r.label == 0,
        outcome=lambda r: r.prediction == 1,
        description="label 0",
    )


def false_discovery_rate_difference(
    records: Sequence[ClassificationRecord], group_a: str, group_b: str
) -> float:
    """Absolute gap in P(label=0 | prediction=1) between the groups."""
    return _error_rate_difference(
        records,
        group_a,
        group_b,
        condition=lambda r: r.prediction == 1,
        outcome=lambda r: r.label == 0,
        description="prediction 1",
    )


_METRIC_FUNCTIONS = {
    METRIC_DEMOGRAPHIC_PARITY: demographic_parity,
    METRIC_FNRD: false_negative_rate_difference,
    METRIC_FORD: false_omission_rate_difference,
    METRIC_FPRD: false_positive_rate_difference,
    METRIC_FDRD: false_discovery_rate_difference,
}


def classwise_fairness(
    records: Sequence[MulticlassRecord],
    sensitive_classes: Sequence[Hashable],
    group_a: str,
    group_b: str,
    metrics: Sequence[str] = ALL_METRICS,
) -> dict[Hashable, dict[str, float | None]]:
    """One-vs-rest binary fairness metrics per sensitive class.

    Each sensitive class is binarized (that class = 1, everything else
    = 0) and the selected binary metrics are delegated to. A metric whose
    conditioning set is empty for a class maps to ``None``. Classes must
    occur among the observed predictions or labels.
    """
    observed = {r.prediction for r in records} | {
        r.label for r in records if r.label is not None
    }
    unknown = [c for c in sensitive_classes if c not in observed]
    if unknown:
        raise UnknownClassError(f"classes never observed in the data: {unknown}")
    bad = [name for name in metrics if name not in _METRIC_FUNCTIONS]
    if bad:
        raise ValueError(f"unknown metrics: {bad}")

    results: dict[Hashable, dict[str, float | None]] = {}
    for cls in sensitive_classes:
        binary = [
            ClassificationRecord(
                prediction=int(r.prediction == cls),
                group=r.group,
                label=None if r.label is None else int(r.label == cls),
            )
            for r in records
        ]
        per_class: dict[str, float | None] = {}
        for name in metrics:
            try:
                per_class[name] = _METRIC_FUNCTIONS[name](binary, group_a, group_b)
            except UndefinedRateError:
                per_class[name] = None
        results[cls] = per_class
    return results
