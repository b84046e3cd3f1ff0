"""Metric families: toxicity, stereotype, counterfactual, classification,
and recommendation."""

from .classification import ClassificationRecord, MulticlassRecord
from .counterfactual import CounterfactualOutputPair
from .generations import ScoredGenerationSet
from .recommendation import RecommendationPair
from .stereotype import CooccurrenceConfig

__all__ = [
    "ClassificationRecord",
    "MulticlassRecord",
    "CounterfactualOutputPair",
    "ScoredGenerationSet",
    "RecommendationPair",
    "CooccurrenceConfig",
]
