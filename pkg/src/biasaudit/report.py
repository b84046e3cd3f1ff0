"""Audit report structure, canonical JSON encoding, and text rendering."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .core.profile import UseCaseProfile
from .framework import MetricPlan


def _encode_value(value: float | None):
    """JSON-safe metric value; non-finite floats become strings."""
    if value is None:
        return None
    if math.isnan(value):
        return "NaN"
    if value == math.inf:
        return "Infinity"
    if value == -math.inf:
        return "-Infinity"
    return value


@dataclass
class MetricResult:
    """One computed metric (or an explicit not-computable entry)."""

    metric: str
    family: str
    value: float | None = None
    computable: bool = True
    reason: str | None = None
    group_pair: tuple[str, str] | None = None
    n: int | None = None
    m: int | None = None
    k: int | None = None
    params: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "family": self.family,
            "value": _encode_value(self.value),
            "computable": self.computable,
            "reason": self.reason,
            "group_pair": list(self.group_pair) if self.group_pair else None,
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "params": dict(self.params),
            "warnings": list(self.warnings),
        }


@dataclass
class AuditReport:
    """Everything one audit run produced, ready to serialize."""

    run_id: str
    timestamp: str
    profile: UseCaseProfile
    plan: MetricPlan
    results: list[MetricResult]
    config_echo: dict
    warnings: list[str] = field(default_factory=list)
    # error classes hit during the run; drives CLI exit codes, never serialized
    error_types: set = field(default_factory=set, compare=False)

    def __post_init__(self) -> None:
        covered = {r.family for r in self.results}
        missing = self.plan.required_families - covered
        if missing:
            raise ValueError(
                f"plan families without any result entry: {sorted(missing)}"
            )

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "timestamp": self.timestamp,
            "profile": self.profile.to_dict(),
            "plan": self.plan.to_dict(),
            "results": [r.to_dict() for r in self.results],
            "config": self.config_echo,
            "warnings": list(self.warnings),
        }


def canonical_json(report: AuditReport) -> str:
    """Deterministic serialization: sorted keys, two-space indent."""
    return json.dumps(
        report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False
    ) + "\n"


def file_digest(path: str | Path) -> dict:
    """Name and content hash of a configuration input file."""
    data = Path(path).read_bytes()
    return {"file": Path(path).name, "sha256": hashlib.sha256(data).hexdigest()}


def _format_value(result: MetricResult) -> str:
    if not result.computable:
        return f"not computable ({result.reason})"
    value = result.value
    if value is None:
        return "n/a"
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return f"{value:.6f}"


def render_text(report: AuditReport) -> str:
    """Human-readable rendering of *report*."""
    lines = []
    lines.append(f"audit run {report.run_id} at {report.timestamp}")
    lines.append(f"task: {report.profile.task}")
    lines.append("")
    if report.plan.not_applicable:
        lines.append("plan: fairness assessment not applicable")
    else:
        lines.append(
            "plan: " + ", ".join(sorted(report.plan.required_families))
        )
    for reason in report.plan.rationale:
        lines.append(f"  - {reason}")
    if report.results:
        lines.append("")
        lines.append("results:")
        width = max(len(r.metric) for r in report.results)
        for result in report.results:
            extras = []
            if result.group_pair:
                extras.append(f"groups={result.group_pair[0]}/{result.group_pair[1]}")
            if result.n is not None:
                extras.append(f"N={result.n}")
            if result.m is not None:
                extras.append(f"m={result.m}")
            if result.k is not None:
                extras.append(f"K={result.k}")
            suffix = f"  [{', '.join(extras)}]" if extras else ""
            lines.append(f"  {result.metric:<{width}}  {_format_value(result)}{suffix}")
            for message in result.warnings:
                lines.append(f"    warning: {message}")
    if report.warnings:
        lines.append("")
        lines.append("warnings:")
        for message in report.warnings:
            lines.append(f"  - {message}")
    return "\n".join(lines) + "\n"
