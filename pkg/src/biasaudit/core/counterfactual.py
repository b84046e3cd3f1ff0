"""Protected-word checks, masking, and counterfactual prompt generation."""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from ..errors import LexiconError, UnmappedTokenWarning
from .lexicon import LexiconSet
from .profile import Prompt
from .tokenization import replace_words, tokenize

MASK_TOKEN = "[MASK]"


@dataclass(frozen=True)
class FtuViolation:
    """One protected word found in one prompt."""

    prompt_id: str
    word: str
    group: str


@dataclass(frozen=True)
class FtuReport:
    """Result of checking prompts for protected attribute words."""

    satisfied: bool
    violations: tuple[FtuViolation, ...]

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "violations": [
                {"prompt_id": v.prompt_id, "word": v.word, "group": v.group}
                for v in self.violations
            ],
        }


def ftu_check(prompts: Iterable[Prompt], lexicons: LexiconSet) -> FtuReport:
    """Report every whole-token, case-insensitive lexicon hit in *prompts*.

    The check is satisfied exactly when no prompt contains any protected
    attribute word. Substring hits ("Theme" vs "he") do not count.
    """
    violations: list[FtuViolation] = []
    for prompt in prompts:
        for token in tokenize(prompt.text):
            group = lexicons.group_of(token)
            if group is not None:
                violations.append(FtuViolation(prompt.id, token, group))
    return FtuReport(satisfied=not violations, violations=tuple(violations))


def mask_protected_words(text: str, lexicons: LexiconSet) -> str:
    """Replace every protected attribute word in *text* with ``[MASK]``.

    Matching is whole-token and case-insensitive; everything else,
    including punctuation and the casing of untouched words, is kept
    verbatim, which makes the operation idempotent.
    """
    words = lexicons.all_words

    def substitute(token: str) -> str | None:
        return MASK_TOKEN if token in words else None

    return replace_words(text, substitute)


@dataclass(frozen=True)
class CounterfactualPair:
    """Two prompts identical except for the protected group they mention.

    ``prompt_a`` mentions only ``group_a`` words and ``prompt_b`` only
    ``group_b`` words. Output lists stay empty until the model under audit
    has been run on both prompts.
    """

    base_prompt_id: str
    group_a: str
    group_b: str
    prompt_a: str
    prompt_b: str
    outputs_a: tuple[str, ...] = ()
    outputs_b: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.outputs_a) != len(self.outputs_b):
            raise ValueError("outputs_a and outputs_b must have equal length")


@dataclass(frozen=True)
class SkippedPrompt:
    """A prompt left out of pair generation, and why."""

    prompt_id: str
    word: str
    reason: str


@dataclass
class PairGenerationResult:
    """Pairs produced plus a structured record of skipped prompts."""

    pairs: list[CounterfactualPair] = field(default_factory=list)
    skipped: list[SkippedPrompt] = field(default_factory=list)


def generate_counterfactual_pairs(
    prompts: Sequence[Prompt],
    lexicons: LexiconSet,
    group_a: str,
    group_b: str,
) -> PairGenerationResult:
    """Build counterfactual prompt pairs for two protected groups.

    Only prompts mentioning at least one word from either group's lexicon
    take part. In ``prompt_a`` every ``group_b`` word is rewritten with its
    ``group_a`` counterpart and vice versa, so each side mentions exactly
    one group. A prompt whose protected word has no substitution entry is
    skipped and reported, never silently dropped.

    Substitution is literal, word for word. English case ambiguity is a
    known artifact: the default mapping sends possessive and objective
    "her" both to "him", so "her car" becomes "him car". Downstream
    metrics mask these words anyway.

    Requires substitution mappings in both directions between the groups.
    """
    words_a = lexicons.words_of(group_a)
    words_b = lexicons.words_of(group_b)
    to_a = lexicons.substitution(group_b, group_a)
    to_b = lexicons.substitution(group_a, group_b)

    result = PairGenerationResult()
    for prompt in prompts:
        tokens = tokenize(prompt.text)
        hits = [t for t in tokens if t in words_a or t in words_b]
        if not hits:
            continue
        unmapped = next(
            (t for t in hits if t in words_b and t not in to_a), None
        ) or next((t for t in hits if t in words_a and t not in to_b), None)
        if unmapped is not None:
            result.skipped.append(
                SkippedPrompt(prompt.id, unmapped, "no substitution entry")
            )
            warnings.warn(
                f"prompt {prompt.id!r}: protected word {unmapped!r} has no "
                f"substitution entry; pair skipped",
                UnmappedTokenWarning,
                stacklevel=2,
            )
            continue
        prompt_a = replace_words(prompt.text, lambda t: to_a.get(t) if t in words_b else None)
        prompt_b = replace_words(prompt.text, lambda t: to_b.get(t) if t in words_a else None)
        result.pairs.append(
            CounterfactualPair(
                base_prompt_id=prompt.id,
                group_a=group_a,
                group_b=group_b,
                prompt_a=prompt_a,
                prompt_b=prompt_b,
            )
        )
    return result


def validate_pair_groups(lexicons: LexiconSet, group_a: str, group_b: str) -> None:
    """Raise unless both groups exist and map onto each other."""
    if group_a == group_b:
        raise LexiconError("counterfactual groups must differ")
    lexicons.words_of(group_a)
    lexicons.words_of(group_b)
    lexicons.substitution(group_a, group_b)
    lexicons.substitution(group_b, group_a)
