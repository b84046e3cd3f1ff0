"""Decision rules mapping a use case profile to the metric families it needs.

The rules enumerate a small, finite truth table:

* Text generation and summarization always gets a toxicity evaluation.
  When prompts mention protected attributes (FTU not satisfied),
  stereotype and counterfactual sentiment metrics are added, plus
  counterfactual similarity when textual content is expected to match
  across groups.
* Classification gets a fairness assessment only when inputs map to a
  protected attribute (person-level data or protected words in prompts).
  Prevalence-sensitive use cases get representation fairness; otherwise
  assistive interventions get the false-negative family and punitive
  interventions the false-positive family.
* Recommendation gets the counterfactual list metrics only when prompts
  mention protected attributes and counterfactual invariance is desired.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core.profile import (
    INTERVENTION_ASSISTIVE,
    TASK_CLASSIFICATION,
    TASK_RECOMMENDATION,
    TASK_TEXT_GENERATION,
    UseCaseProfile,
)

FAMILY_TOXICITY = "toxicity"
FAMILY_STEREOTYPE = "stereotype"
FAMILY_COUNTERFACTUAL_SIMILARITY = "counterfactual-similarity"
FAMILY_COUNTERFACTUAL_SENTIMENT = "counterfactual-sentiment"
FAMILY_REPRESENTATION_FAIRNESS = "representation-fairness"
FAMILY_ERROR_BASED_FN = "error-based-fairness-fn"
FAMILY_ERROR_BASED_FP = "error-based-fairness-fp"
FAMILY_RECOMMENDATION = "recommendation-counterfactual"

ALL_FAMILIES = frozenset(
    {
        FAMILY_TOXICITY,
        FAMILY_STEREOTYPE,
        FAMILY_COUNTERFACTUAL_SIMILARITY,
        FAMILY_COUNTERFACTUAL_SENTIMENT,
        FAMILY_REPRESENTATION_FAIRNESS,
        FAMILY_ERROR_BASED_FN,
        FAMILY_ERROR_BASED_FP,
        FAMILY_RECOMMENDATION,
    }
)


@dataclass(frozen=True)
class MetricPlan:
    """The metric families a use case needs, with the rules that fired."""

    required_families: frozenset[str]
    not_applicable: bool
    rationale: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.not_applicable and self.required_families:
            raise ValueError("a not-applicable plan cannot require families")
        unknown = self.required_families - ALL_FAMILIES
        if unknown:
            raise ValueError(f"unknown metric families: {sorted(unknown)}")
        if not self.rationale:
            raise ValueError("a plan must explain itself")

    def to_dict(self) -> dict:
        return {
            "required_families": sorted(self.required_families),
            "not_applicable": self.not_applicable,
            "rationale": list(self.rationale),
        }


def recommend_metrics(profile: UseCaseProfile) -> MetricPlan:
    """Select the metric families applicable to *profile*.

    Pure and total over the finite profile space; flags that do not apply
    to the profile's task are ignored, never errors.
    """
    families: set[str] = set()
    rationale: list[str] = []

    if profile.task == TASK_TEXT_GENERATION:
        families.add(FAMILY_TOXICITY)
        rationale.append(
            "text generation and summarization always undergoes toxicity "
            "evaluation, with or without FTU"
        )
        if profile.ftu_satisfied:
            rationale.append(
                "prompts mention no protected attribute words (FTU satisfied): "
                "stereotype and counterfactual metrics are not required; "
                "optional suggestion: residual stereotype risk can still be "
                "assessed if desired"
            )
        else:
            families.add(FAMILY_STEREOTYPE)
            families.add(FAMILY_COUNTERFACTUAL_SENTIMENT)
            rationale.append(
                "prompts mention protected attribute words (FTU not satisfied): "
                "stereotype and counterfactual sentiment metrics apply"
            )
            if profile.similarity_relevant:
                families.add(FAMILY_COUNTERFACTUAL_SIMILARITY)
                rationale.append(
                    "textual content should match across groups: counterfactual "
                    "similarity metrics apply"
                )
            else:
                rationale.append(
                    "textual content is expected to differ across groups: "
                    "counterfactual similarity omitted as too strict"
                )
        return MetricPlan(frozenset(families), False, tuple(rationale))

    if profile.task == TASK_CLASSIFICATION:
        if not profile.person_level and profile.ftu_satisfied:
            rationale.append(
                "inputs are not person-level and mention no protected attribute "
                "words: they cannot be mapped to a protected attribute, so a "
                "fairness assessment is not applicable"
            )
            return MetricPlan(frozenset(), True, tuple(rationale))
        rationale.append(
            "inputs map to a protected attribute (person-level data or "
            "protected words in prompts): group fairness metrics apply"
        )
        if profile.equal_prevalence_desired:
            families.add(FAMILY_REPRESENTATION_FAIRNESS)
            rationale.append(
                "positive predictions should be approximately equally prevalent "
                "across groups: representation fairness metrics apply"
            )
        elif profile.intervention == INTERVENTION_ASSISTIVE:
            families.add(FAMILY_ERROR_BASED_FN)
            rationale.append(
                "assistive interventions make false negatives the costly error: "
                "false-negative-focused metrics apply"
            )
        else:
            families.add(FAMILY_ERROR_BASED_FP)
            rationale.append(
                "punitive interventions make false positives the costly error: "
                "false-positive-focused metrics apply"
            )
        return MetricPlan(frozenset(families), False, tuple(rationale))

    # recommendation
    if profile.ftu_satisfied:
        rationale.append(
            "prompts mention no protected attribute words (FTU satisfied): a "
            "fairness assessment is not applicable"
        )
        return MetricPlan(frozenset(), True, tuple(rationale))
    if not profile.counterfactual_invariance_desired:
        rationale.append(
            "counterfactual invariance is not desired for this use case "
            "(recommendations may legitimately differ across groups): a "
            "fairness assessment is not applicable"
        )
        return MetricPlan(frozenset(), True, tuple(rationale))
    families.add(FAMILY_RECOMMENDATION)
    rationale.append(
        "prompts mention protected attribute words and counterfactual "
        "invariance is desired: counterfactual recommendation metrics apply"
    )
    return MetricPlan(frozenset(families), False, tuple(rationale))
