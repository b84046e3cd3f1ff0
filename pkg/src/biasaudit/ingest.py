"""Streaming JSONL ingestion with per-line schema validation.

One record per line; every error carries the 1-based line number. The
readers are generators, so memory stays bounded by record size (plus an
id set for duplicate detection), not file size.

Schemas:

* generation      {"prompt_id", "prompt", "generations": [{"index",
                  "text", "toxicity_score"?, "stereotype_score"?,
                  "sentiment_score"?, "embedding"?}], "group"?}
* classification  {"id", "prediction", "label"?, "group"}
* recommendation  {"pair_id", "group_a", "group_b", "list_a", "list_b"}
* counterfactual  {"pair_id", "group_a", "group_b", "prompt_a"?,
                  "prompt_b"?, "output_a", "output_b", "sentiment_a"?,
                  "sentiment_b"?, "embedding_a"?, "embedding_b"?,
                  "base_prompt_id"?}

The counterfactual schema is what the ``counterfactuals`` CLI command
emits (with null outputs) and what a completed run feeds back to
``audit`` once the model's outputs have been filled in.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateIdError, MalformedLineError, SchemaViolationError

SCHEMA_GENERATION = "generation"
SCHEMA_CLASSIFICATION = "classification"
SCHEMA_RECOMMENDATION = "recommendation"
SCHEMA_COUNTERFACTUAL = "counterfactual"


@dataclass(frozen=True)
class GenerationEntry:
    """One model response with any inline scores shipped alongside it."""

    index: int
    text: str
    toxicity_score: float | None = None
    stereotype_score: float | None = None
    sentiment_score: float | None = None
    embedding: tuple[float, ...] | None = None


@dataclass(frozen=True)
class GenerationRecord:
    prompt_id: str
    prompt: str
    generations: tuple[GenerationEntry, ...]
    group: str | None = None


@dataclass(frozen=True)
class ClassificationRow:
    id: str
    prediction: int
    group: str
    label: int | None = None


@dataclass(frozen=True)
class RecommendationRow:
    pair_id: str
    group_a: str
    group_b: str
    list_a: tuple[str, ...]
    list_b: tuple[str, ...]


@dataclass(frozen=True)
class CounterfactualRow:
    pair_id: str
    group_a: str
    group_b: str
    output_a: str | None
    output_b: str | None
    prompt_a: str | None = None
    prompt_b: str | None = None
    base_prompt_id: str | None = None
    sentiment_a: float | None = None
    sentiment_b: float | None = None
    embedding_a: tuple[float, ...] | None = None
    embedding_b: tuple[float, ...] | None = None


def _lines(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(str(exc), number) from exc
            if not isinstance(data, dict):
                raise SchemaViolationError("record is not a JSON object", number)
            yield number, data


def _need_str(data: dict, key: str, line: int, allow_empty: bool = False) -> str:
    value = data.get(key)
    if not isinstance(value, str) or (not allow_empty and not value):
        raise SchemaViolationError(f"field {key!r} must be a non-empty string", line)
    return value


def _optional_score(data: dict, key: str, line: int) -> float | None:
    value = data.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaViolationError(f"field {key!r} must be a finite number", line)
    return float(value)


def _optional_embedding(data: dict, key: str, line: int) -> tuple[float, ...] | None:
    value = data.get(key)
    if value is None:
        return None
    if (
        not isinstance(value, list)
        or not value
        or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v)
            for v in value
        )
    ):
        raise SchemaViolationError(
            f"field {key!r} must be a non-empty array of finite numbers", line
        )
    return tuple(float(v) for v in value)


def _check_duplicate(seen: set[str], value: str, what: str, line: int) -> None:
    if value in seen:
        raise DuplicateIdError(f"duplicate {what} {value!r}", line)
    seen.add(value)


def read_generation_records(path: str | Path) -> Iterator[GenerationRecord]:
    """Stream generation records, validating each line."""
    seen: set[str] = set()
    for line, data in _lines(path):
        prompt_id = _need_str(data, "prompt_id", line)
        _check_duplicate(seen, prompt_id, "prompt_id", line)
        prompt = _need_str(data, "prompt", line)
        raw_generations = data.get("generations")
        if not isinstance(raw_generations, list) or not raw_generations:
            raise SchemaViolationError(
                "field 'generations' must be a non-empty array", line
            )
        entries = []
        indexes: set[int] = set()
        for raw in raw_generations:
            if not isinstance(raw, dict):
                raise SchemaViolationError("each generation must be an object", line)
            index = raw.get("index")
            if isinstance(index, bool) or not isinstance(index, int) or index < 1:
                raise SchemaViolationError(
                    "generation 'index' must be an integer >= 1", line
                )
            if index in indexes:
                raise DuplicateIdError(
                    f"duplicate generation index {index} for prompt {prompt_id!r}", line
                )
            indexes.add(index)
            text = raw.get("text")
            if not isinstance(text, str):
                raise SchemaViolationError("generation 'text' must be a string", line)
            entries.append(
                GenerationEntry(
                    index=index,
                    text=text,
                    toxicity_score=_optional_score(raw, "toxicity_score", line),
                    stereotype_score=_optional_score(raw, "stereotype_score", line),
                    sentiment_score=_optional_score(raw, "sentiment_score", line),
                    embedding=_optional_embedding(raw, "embedding", line),
                )
            )
        group = data.get("group")
        if group is not None and (not isinstance(group, str) or not group):
            raise SchemaViolationError("field 'group' must be a non-empty string", line)
        yield GenerationRecord(
            prompt_id=prompt_id,
            prompt=prompt,
            generations=tuple(sorted(entries, key=lambda e: e.index)),
            group=group,
        )


def read_classification_rows(path: str | Path) -> Iterator[ClassificationRow]:
    """Stream binary classification records, validating each line."""
    seen: set[str] = set()
    for line, data in _lines(path):
        row_id = _need_str(data, "id", line)
        _check_duplicate(seen, row_id, "id", line)
        prediction = data.get("prediction")
        if isinstance(prediction, bool) or prediction not in (0, 1):
            raise SchemaViolationError("field 'prediction' must be 0 or 1", line)
        label = data.get("label")
        if label is not None and (isinstance(label, bool) or label not in (0, 1)):
            raise SchemaViolationError("field 'label' must be 0 or 1", line)
        group = _need_str(data, "group", line)
        yield ClassificationRow(
            id=row_id, prediction=prediction, label=label, group=group
        )


def _need_item_list(data: dict, key: str, line: int) -> tuple[str, ...]:
    value = data.get(key)
    if (
        not isinstance(value, list)
        or not value
        or any(not isinstance(v, str) or not v for v in value)
    ):
        raise SchemaViolationError(
            f"field {key!r} must be a non-empty array of non-empty strings", line
        )
    if len(set(value)) != len(value):
        raise SchemaViolationError(f"field {key!r} contains duplicate items", line)
    return tuple(value)


def read_recommendation_rows(path: str | Path) -> Iterator[RecommendationRow]:
    """Stream recommendation-list pairs, validating each line."""
    seen: set[str] = set()
    for line, data in _lines(path):
        pair_id = _need_str(data, "pair_id", line)
        _check_duplicate(seen, pair_id, "pair_id", line)
        list_a = _need_item_list(data, "list_a", line)
        list_b = _need_item_list(data, "list_b", line)
        if len(list_a) != len(list_b):
            raise SchemaViolationError(
                f"list_a has {len(list_a)} items but list_b has {len(list_b)}", line
            )
        yield RecommendationRow(
            pair_id=pair_id,
            group_a=_need_str(data, "group_a", line),
            group_b=_need_str(data, "group_b", line),
            list_a=list_a,
            list_b=list_b,
        )


def read_counterfactual_rows(path: str | Path) -> Iterator[CounterfactualRow]:
    """Stream counterfactual output pairs, validating each line.

    Outputs may be null in a freshly generated pairs file; metric
    execution requires them to be filled in.
    """
    seen: set[str] = set()
    for line, data in _lines(path):
        pair_id = _need_str(data, "pair_id", line)
        _check_duplicate(seen, pair_id, "pair_id", line)
        outputs = {}
        for key in ("output_a", "output_b"):
            value = data.get(key)
            if value is not None and not isinstance(value, str):
                raise SchemaViolationError(f"field {key!r} must be a string or null", line)
            outputs[key] = value
        if (outputs["output_a"] is None) != (outputs["output_b"] is None):
            raise SchemaViolationError(
                "output_a and output_b must both be present or both null", line
            )
        prompts = {}
        for key in ("prompt_a", "prompt_b"):
            value = data.get(key)
            if value is not None and (not isinstance(value, str) or not value):
                raise SchemaViolationError(
                    f"field {key!r} must be a non-empty string or omitted", line
                )
            prompts[key] = value
        base = data.get("base_prompt_id")
        if base is not None and (not isinstance(base, str) or not base):
            raise SchemaViolationError(
                "field 'base_prompt_id' must be a non-empty string or omitted", line
            )
        yield CounterfactualRow(
            pair_id=pair_id,
            group_a=_need_str(data, "group_a", line),
            group_b=_need_str(data, "group_b", line),
            output_a=outputs["output_a"],
            output_b=outputs["output_b"],
            prompt_a=prompts["prompt_a"],
            prompt_b=prompts["prompt_b"],
            base_prompt_id=base,
            sentiment_a=_optional_score(data, "sentiment_a", line),
            sentiment_b=_optional_score(data, "sentiment_b", line),
            embedding_a=_optional_embedding(data, "embedding_a", line),
            embedding_b=_optional_embedding(data, "embedding_b", line),
        )


def read_prompts(path: str | Path) -> Iterator[tuple[str, str]]:
    """Stream (prompt_id, prompt) pairs from any file carrying those fields.

    Accepts full generation files as well as bare prompt files; every
    other field is ignored.
    """
    seen: set[str] = set()
    for line, data in _lines(path):
        prompt_id = _need_str(data, "prompt_id", line)
        _check_duplicate(seen, prompt_id, "prompt_id", line)
        yield prompt_id, _need_str(data, "prompt", line)


def load_word_list(path: str | Path) -> list[str]:
    """Read a one-token-per-line word file, lowercased, blanks skipped."""
    words = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            word = line.strip().lower()
            if word:
                words.append(word)
    return words
