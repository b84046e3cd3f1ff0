"""Similarity metrics over counterfactual recommendation-list pairs.

Each pair holds the two ordered top-K lists a model produced for two
prompts differing only in the protected group mentioned. All three
metrics average a per-pair similarity, range over [0, 1], and grow as
the lists agree. Rank-aware variants take the minimum over the two
directions for symmetry.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from ..errors import EmptyInputError


@dataclass(frozen=True)
class RecommendationPair:
    """Two ordered lists of distinct item ids, one per counterfactual side."""

    list_a: tuple[str, ...]
    list_b: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.list_a or not self.list_b:
            raise ValueError("recommendation lists must be non-empty")
        if len(self.list_a) != len(self.list_b):
            raise ValueError("both lists in a pair must have the same length K")
        for side, items in (("a", self.list_a), ("b", self.list_b)):
            if len(set(items)) != len(items):
                raise ValueError(f"list_{side} contains duplicate items")

    @property
    def k(self) -> int:
        return len(self.list_a)


def _uniform_k(pairs: Sequence[RecommendationPair]) -> int:
    if not pairs:
        raise EmptyInputError("no recommendation pairs")
    sizes = {p.k for p in pairs}
    if len(sizes) > 1:
        raise ValueError(f"all pairs must share one K; saw {sorted(sizes)}")
    return sizes.pop()


def jaccard_at_k(pairs: Sequence[RecommendationPair]) -> float:
    """Mean ratio of intersection to union size over list pairs.

    Rank-blind: permuting items within a list leaves it unchanged.
    """
    _uniform_k(pairs)
    total = 0.0
    for pair in pairs:
        set_a, set_b = set(pair.list_a), set(pair.list_b)
        total += len(set_a & set_b) / len(set_a | set_b)
    return total / len(pairs)


def _serp_directional(source: Sequence[str], other: Sequence[str], k: int) -> float:
    other_set = set(other)
    score = sum(
        k - rank + 1
        for rank, item in enumerate(source, start=1)
        if item in other_set
    )
    return score / (k * (k + 1) / 2)


def serp_at_k(pairs: Sequence[RecommendationPair]) -> float:
    """Mean rank-weighted overlap of list pairs.

    Items shared with the other list earn weight K - rank + 1 by their
    rank in the source list, normalized by K(K+1)/2; the pair takes the
    minimum over the two directions.
    """
    k = _uniform_k(pairs)
    return math.fsum(
        min(
            _serp_directional(p.list_a, p.list_b, k),
            _serp_directional(p.list_b, p.list_a, k),
        )
        for p in pairs
    ) / len(pairs)


def _prag_directional(source: Sequence[str], other: Sequence[str], k: int) -> float:
    # rank of an item absent from a list is treated as +inf, so an absent
    # item can never be ranked before a present one
    source_rank = {item: rank for rank, item in enumerate(source, start=1)}
    other_rank = {item: rank for rank, item in enumerate(other, start=1)}
    matches = 0
    for v1 in source:
        if v1 not in other_rank:
            continue
        for v2 in source:
            if v1 == v2:
                continue
            if source_rank[v1] < source_rank[v2] and other_rank[v1] < other_rank.get(
                v2, math.inf
            ):
                matches += 1
    return matches / (k * (k + 1))


def prag_at_k(pairs: Sequence[RecommendationPair], normalized: bool = False) -> float:
    """Mean pairwise rank-agreement of list pairs.

    Counts ordered item pairs of the source list whose relative order is
    preserved in the other list, normalized by K(K+1); the pair takes the
    minimum over the two directions. That normalizer makes the
    identical-list value (K-1)/(2(K+1)) rather than 1; reports annotate
    the attainable maximum for the run's K, and *normalized* opts in to
    rescaling by it so identical lists score 1 (K >= 2 only).
    """
    k = _uniform_k(pairs)
    value = math.fsum(
        min(
            _prag_directional(p.list_a, p.list_b, k),
            _prag_directional(p.list_b, p.list_a, k),
        )
        for p in pairs
    ) / len(pairs)
    if normalized:
        ceiling = prag_attainable_maximum(k)
        if ceiling == 0.0:
            raise ValueError("normalized form is undefined for K = 1")
        value /= ceiling
    return value


def prag_attainable_maximum(k: int) -> float:
    """Value of the pairwise rank-agreement metric on identical lists."""
    if k < 1:
        raise ValueError("K must be >= 1")
    return (k - 1) / (2 * (k + 1))
