import itertools
import json
from pathlib import Path

import pytest

from biasaudit.core import UseCaseProfile
from biasaudit.framework import (
    ALL_FAMILIES,
    FAMILY_COUNTERFACTUAL_SENTIMENT,
    FAMILY_COUNTERFACTUAL_SIMILARITY,
    FAMILY_ERROR_BASED_FP,
    FAMILY_RECOMMENDATION,
    FAMILY_STEREOTYPE,
    FAMILY_TOXICITY,
    MetricPlan,
    recommend_metrics,
)

GOLDEN = json.loads(
    (Path(__file__).parent / "data" / "framework_truth_table.json").read_text()
)

FLAG_SPACE = list(
    itertools.product(
        ["text-generation-summarization", "classification", "recommendation"],
        [True, False],
        [True, False],
        [True, False],
        ["assistive", "punitive"],
        [True, False],
        [True, False],
    )
)


def profile_from(row):
    return UseCaseProfile(**row)


def test_golden_table_is_exhaustive():
    assert len(GOLDEN) == len(FLAG_SPACE) == 192
    seen = {tuple(sorted(row["profile"].items())) for row in GOLDEN}
    assert len(seen) == 192


def test_full_truth_table_matches_golden():
    for row in GOLDEN:
        plan = recommend_metrics(profile_from(row["profile"]))
        assert sorted(plan.required_families) == row["required_families"], row["profile"]
        assert plan.not_applicable == row["not_applicable"], row["profile"]
        assert plan.rationale  # every firing explains itself


# --- quoted anchor rules -----------------------------------------------------


def test_text_generation_under_ftu_is_toxicity_only():
    plan = recommend_metrics(
        UseCaseProfile(task="text-generation-summarization", ftu_satisfied=True)
    )
    assert plan.required_families == frozenset({FAMILY_TOXICITY})
    assert not plan.not_applicable


def test_punitive_person_level_classification_gets_fp_family():
    plan = recommend_metrics(
        UseCaseProfile(
            task="classification",
            ftu_satisfied=False,
            person_level=True,
            equal_prevalence_desired=False,
            intervention="punitive",
        )
    )
    assert plan.required_families == frozenset({FAMILY_ERROR_BASED_FP})


def test_recommendation_under_ftu_not_applicable():
    plan = recommend_metrics(
        UseCaseProfile(task="recommendation", ftu_satisfied=True)
    )
    assert plan.not_applicable and plan.required_families == frozenset()


# --- structural properties -----------------------------------------------------


def test_losing_ftu_never_removes_text_generation_families():
    for similarity in (True, False):
        with_ftu = recommend_metrics(
            UseCaseProfile(
                task="text-generation-summarization",
                ftu_satisfied=True,
                similarity_relevant=similarity,
            )
        )
        without_ftu = recommend_metrics(
            UseCaseProfile(
                task="text-generation-summarization",
                ftu_satisfied=False,
                similarity_relevant=similarity,
            )
        )
        assert with_ftu.required_families <= without_ftu.required_families


def test_not_applicable_only_in_the_two_quoted_cases():
    for task, ftu, person, prev, interv, inv, sim in FLAG_SPACE:
        plan = recommend_metrics(
            UseCaseProfile(
                task=task,
                ftu_satisfied=ftu,
                person_level=person,
                equal_prevalence_desired=prev,
                intervention=interv,
                counterfactual_invariance_desired=inv,
                similarity_relevant=sim,
            )
        )
        expected = (task == "classification" and not person and ftu) or (
            task == "recommendation" and (ftu or not inv)
        )
        assert plan.not_applicable == expected


def test_similarity_flag_gates_only_similarity_family():
    base = dict(task="text-generation-summarization", ftu_satisfied=False)
    strict = recommend_metrics(UseCaseProfile(similarity_relevant=True, **base))
    relaxed = recommend_metrics(UseCaseProfile(similarity_relevant=False, **base))
    assert strict.required_families - relaxed.required_families == {
        FAMILY_COUNTERFACTUAL_SIMILARITY
    }
    assert FAMILY_STEREOTYPE in relaxed.required_families
    assert FAMILY_COUNTERFACTUAL_SENTIMENT in relaxed.required_families


def test_recommendation_family_requires_invariance_desired():
    plan = recommend_metrics(
        UseCaseProfile(
            task="recommendation",
            ftu_satisfied=False,
            counterfactual_invariance_desired=False,
        )
    )
    assert plan.not_applicable
    plan = recommend_metrics(
        UseCaseProfile(
            task="recommendation",
            ftu_satisfied=False,
            counterfactual_invariance_desired=True,
        )
    )
    assert plan.required_families == frozenset({FAMILY_RECOMMENDATION})


def test_plan_validation():
    with pytest.raises(ValueError):
        MetricPlan(frozenset({FAMILY_TOXICITY}), True, ("x",))
    with pytest.raises(ValueError):
        MetricPlan(frozenset({"made-up"}), False, ("x",))
    with pytest.raises(ValueError):
        MetricPlan(frozenset(), False, ())
    assert ALL_FAMILIES  # exported for plan construction
