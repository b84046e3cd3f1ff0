"""Similarity and sentiment metrics over counterfactual output pairs.

Each pair holds the two texts a model produced for two prompts that were
identical except for the protected group mentioned. The similarity
metrics (ROUGE-L, BLEU, cosine) reward pairs that say the same thing; the
sentiment metrics reward pairs whose sentiment-score distributions match.
Token-matching metrics expect protected words to have been masked
upstream so that "he drove his car" and "she drove her car" compare as
identical.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass

from ..core.tokenization import tokenize
from ..errors import (
    EmptyInputError,
    EmptyTextWarning,
    MissingEmbeddingError,
    MissingScoreError,
    ShortTextWarning,
    ZeroNormVectorError,
)

DEFAULT_TAU = 0.5
SMALLER_FAIRER = "smaller-fairer"
LARGER_FAIRER = "larger-fairer"

MAX_NGRAM_ORDER = 4


@dataclass(frozen=True)
class CounterfactualOutputPair:
    """One pair of outputs generated from a counterfactual prompt pair."""

    text_a: str
    text_b: str
    sentiment_a: float | None = None
    sentiment_b: float | None = None
    embedding_a: tuple[float, ...] | None = None
    embedding_b: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if (
            self.embedding_a is not None
            and self.embedding_b is not None
            and len(self.embedding_a) != len(self.embedding_b)
        ):
            raise ValueError("pair embeddings must share one dimension")


def _require_pairs(pairs: Sequence[CounterfactualOutputPair]) -> None:
    if not pairs:
        raise EmptyInputError("no counterfactual output pairs")


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence of two token sequences."""
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def _rouge_l_f(tokens_a: Sequence[str], tokens_b: Sequence[str]) -> float:
    if not tokens_a or not tokens_b:
        warnings.warn(
            "empty text in counterfactual pair; similarity taken as 0",
            EmptyTextWarning,
            stacklevel=3,
        )
        return 0.0
    lcs = lcs_length(tokens_a, tokens_b)
    if lcs == 0:
        return 0.0
    recall_a = lcs / len(tokens_a)
    recall_b = lcs / len(tokens_b)
    return 2.0 * recall_a * recall_b / (recall_a + recall_b)


def counterfactual_rouge_l(pairs: Sequence[CounterfactualOutputPair]) -> float:
    """Average ROUGE-L F-measure over counterfactual output pairs.

    Per pair, the longest common token subsequence L gives the two
    length-normalized recalls r_a = L/len(a) and r_b = L/len(b); the pair
    scores their harmonic mean, taken as 0 when L = 0. Returns the mean
    over pairs, in [0, 1], 1 meaning token-identical texts.
    """
    _require_pairs(pairs)
    return math.fsum(
        _rouge_l_f(tokenize(p.text_a), tokenize(p.text_b)) for p in pairs
    ) / len(pairs)


def _ngram_counts(tokens: Sequence[str], order: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(tokens) - order + 1):
        gram = tuple(tokens[i : i + order])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def _bleu_direction(
    candidate: Sequence[str], reference: Sequence[str], smoothing: bool
) -> float:
    if len(candidate) < MAX_NGRAM_ORDER:
        warnings.warn(
            f"text with {len(candidate)} tokens is too short for 4-gram "
            f"precision; direction scored 0",
            ShortTextWarning,
            stacklevel=4,
        )
        return 0.0
    log_sum = 0.0
    for order in range(1, MAX_NGRAM_ORDER + 1):
        cand_counts = _ngram_counts(candidate, order)
        ref_counts = _ngram_counts(reference, order)
        clipped = sum(
            min(count, ref_counts.get(gram, 0)) for gram, count in cand_counts.items()
        )
        total = sum(cand_counts.values())
        if smoothing:
            clipped += 1
            total += 1
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
    brevity = min(1.0, math.exp(1.0 - len(reference) / len(candidate)))
    return brevity * math.exp(log_sum / MAX_NGRAM_ORDER)


def counterfactual_bleu(
    pairs: Sequence[CounterfactualOutputPair], smoothing: bool = False
) -> float:
    """Average symmetric BLEU over counterfactual output pairs.

    Each direction multiplies the geometric mean of clipped 1..4-gram
    precisions by a brevity factor min(1, exp(1 - len(ref)/len(cand)));
    the pair takes the minimum of its two directions for symmetry. Any
    zero precision zeroes a direction unless add-one *smoothing* is
    enabled; texts under 4 tokens score 0 with a warning.
    """
    _require_pairs(pairs)
    total = 0.0
    for pair in pairs:
        tokens_a = tokenize(pair.text_a)
        tokens_b = tokenize(pair.text_b)
        total += min(
            _bleu_direction(tokens_a, tokens_b, smoothing),
            _bleu_direction(tokens_b, tokens_a, smoothing),
        )
    return total / len(pairs)


def _cosine(a: Sequence[float], b: Sequence[float]) -> float:
    norm_a = math.sqrt(math.fsum(x * x for x in a))
    norm_b = math.sqrt(math.fsum(x * x for x in b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroNormVectorError("cosine similarity undefined for zero-norm vector")
    dot = math.fsum(x * y for x, y in zip(a, b))
    return dot / (norm_a * norm_b)


def counterfactual_cosine_similarity(pairs: Sequence[CounterfactualOutputPair]) -> float:
    """Average embedding cosine similarity over counterfactual output pairs.

    Every pair must carry embeddings of one shared dimension; zero-norm
    vectors are an error. Ranges over [-1, 1].
    """
    _require_pairs(pairs)
    dims = set()
    for pair in pairs:
        if pair.embedding_a is None or pair.embedding_b is None:
            raise MissingEmbeddingError("pair is missing an embedding")
        dims.add(len(pair.embedding_a))
        dims.add(len(pair.embedding_b))
    if len(dims) > 1:
        raise ValueError(f"embeddings disagree on dimension: {sorted(dims)}")
    return math.fsum(
        _cosine(p.embedding_a, p.embedding_b) for p in pairs
    ) / len(pairs)


def _sentiment_sides(
    pairs: Sequence[CounterfactualOutputPair],
) -> tuple[list[float], list[float]]:
    side_a, side_b = [], []
    for pair in pairs:
        if pair.sentiment_a is None or pair.sentiment_b is None:
            raise MissingScoreError("pair is missing a sentiment score")
        side_a.append(pair.sentiment_a)
        side_b.append(pair.sentiment_b)
    return side_a, side_b


def strict_sentiment_parity(pairs: Sequence[CounterfactualOutputPair]) -> float:
    """Wasserstein-1 distance between the two sides' sentiment distributions.

    Pools all side-a scores against all side-b scores and computes the
    exact earth-mover distance on [0, 1] via sorted order statistics
    (both sides always have equal size N, so W1 = mean |a_(i) - b_(i)|).
    0 means the distributions coincide.
    """
    _require_pairs(pairs)
    side_a, side_b = _sentiment_sides(pairs)
    side_a.sort()
    side_b.sort()
    return math.fsum(abs(a - b) for a, b in zip(side_a, side_b)) / len(side_a)


def weak_sentiment_parity(
    pairs: Sequence[CounterfactualOutputPair],
    tau: float = DEFAULT_TAU,
    per_pair_indicators: bool = False,
) -> float:
    """Gap in positive-sentiment rates after binarizing at *tau* (strict >).

    The default compares the two sides' overall rates:
    |mean(I(a_i > tau)) - mean(I(b_i > tau))|. With *per_pair_indicators*
    the per-pair absolute indicator differences are averaged instead,
    which counts the fraction of pairs whose sides disagree.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must be in (0, 1)")
    _require_pairs(pairs)
    side_a, side_b = _sentiment_sides(pairs)
    if per_pair_indicators:
        return math.fsum(
            abs(float(a > tau) - float(b > tau)) for a, b in zip(side_a, side_b)
        ) / len(side_a)
    rate_a = sum(1 for a in side_a if a > tau) / len(side_a)
    rate_b = sum(1 for b in side_b if b > tau) / len(side_b)
    return abs(rate_a - rate_b)


def invariance_check(value: float, direction: str, epsilon: float) -> bool:
    """Whether a counterfactual metric value satisfies the tolerance.

    Distance-like metrics pass when value <= epsilon; similarity-like
    metrics pass when (1 - value) <= epsilon.
    """
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    if direction == SMALLER_FAIRER:
        return value <= epsilon
    if direction == LARGER_FAIRER:
        return (1.0 - value) <= epsilon
    raise ValueError(f"unknown direction {direction!r}")
