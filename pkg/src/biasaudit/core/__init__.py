"""Domain types, lexicon handling, tokenization, and counterfactual prompts."""

from .counterfactual import (
    MASK_TOKEN,
    CounterfactualPair,
    FtuReport,
    FtuViolation,
    PairGenerationResult,
    SkippedPrompt,
    ftu_check,
    generate_counterfactual_pairs,
    mask_protected_words,
    validate_pair_groups,
)
from .lexicon import LexiconSet, default_lexicon_path, default_lexicons, load_lexicons
from .profile import (
    INTERVENTION_ASSISTIVE,
    INTERVENTION_PUNITIVE,
    INTERVENTIONS,
    TASK_CLASSIFICATION,
    TASK_RECOMMENDATION,
    TASK_TEXT_GENERATION,
    TASKS,
    Generation,
    Prompt,
    UseCaseProfile,
)
from .tokenization import replace_words, tokenize

__all__ = [
    "MASK_TOKEN",
    "CounterfactualPair",
    "FtuReport",
    "FtuViolation",
    "PairGenerationResult",
    "SkippedPrompt",
    "ftu_check",
    "generate_counterfactual_pairs",
    "mask_protected_words",
    "validate_pair_groups",
    "LexiconSet",
    "default_lexicon_path",
    "default_lexicons",
    "load_lexicons",
    "INTERVENTION_ASSISTIVE",
    "INTERVENTION_PUNITIVE",
    "INTERVENTIONS",
    "TASK_CLASSIFICATION",
    "TASK_RECOMMENDATION",
    "TASK_TEXT_GENERATION",
    "TASKS",
    "Generation",
    "Prompt",
    "UseCaseProfile",
    "replace_words",
    "tokenize",
]
