"""Domain types describing an evaluation set and its use case."""

from __future__ import annotations

from dataclasses import dataclass

TASK_TEXT_GENERATION = "text-generation-summarization"
TASK_CLASSIFICATION = "classification"
TASK_RECOMMENDATION = "recommendation"
TASKS = (TASK_TEXT_GENERATION, TASK_CLASSIFICATION, TASK_RECOMMENDATION)

INTERVENTION_ASSISTIVE = "assistive"
INTERVENTION_PUNITIVE = "punitive"
INTERVENTIONS = (INTERVENTION_ASSISTIVE, INTERVENTION_PUNITIVE)


@dataclass(frozen=True)
class Prompt:
    """One input text from the evaluated population."""

    id: str
    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError(f"prompt {self.id!r} has empty text")


@dataclass(frozen=True)
class Generation:
    """One model response, the *index*-th of its prompt's sample."""

    prompt_id: str
    index: int
    text: str

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("generation index must be >= 1")


@dataclass(frozen=True)
class UseCaseProfile:
    """Task category and the stakeholder flags that drive metric selection.

    The classification-only flags (``person_level``,
    ``equal_prevalence_desired``, ``intervention``) are ignored for the
    other tasks, and ``similarity_relevant`` is ignored for recommendation.
    """

    task: str
    ftu_satisfied: bool
    person_level: bool = False
    equal_prevalence_desired: bool = False
    intervention: str = INTERVENTION_ASSISTIVE
    counterfactual_invariance_desired: bool = True
    similarity_relevant: bool = True

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.intervention not in INTERVENTIONS:
            raise ValueError(
                f"unknown intervention {self.intervention!r}; expected one of {INTERVENTIONS}"
            )

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "ftu_satisfied": self.ftu_satisfied,
            "person_level": self.person_level,
            "equal_prevalence_desired": self.equal_prevalence_desired,
            "intervention": self.intervention,
            "counterfactual_invariance_desired": self.counterfactual_invariance_desired,
            "similarity_relevant": self.similarity_relevant,
        }
