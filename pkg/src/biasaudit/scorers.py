"""Uniform access to toxicity/stereotype/sentiment scores and embeddings.

Metric modules never talk to a classifier directly; they consume plain
floats in [0, 1] (or embedding vectors) produced here. Three provider
styles cover the practical cases:

* inline  -- scores/vectors precomputed upstream and shipped in the input
  records, keyed by exact text;
* stub    -- deterministic text functions for tests and dry runs;
* remote  -- a JSON-over-HTTP scorer service.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
import urllib.error
import urllib.request
import warnings
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor

from .core.tokenization import tokenize
from .errors import (
    ClampedScoreWarning,
    ConfigError,
    MalformedResponseError,
    MissingEmbeddingError,
    MissingScoreError,
    ProviderUnavailableError,
)

KIND_TOXICITY = "toxicity"
KIND_STEREOTYPE = "stereotype"
KIND_SENTIMENT = "sentiment"
SCORE_KINDS = (KIND_TOXICITY, KIND_STEREOTYPE, KIND_SENTIMENT)


class InlineScores:
    """Passthrough provider for scores precomputed upstream.

    Looks scores up by exact text. A text without an entry raises
    ``MissingScoreError`` -- inline runs must ship a score for every text
    they evaluate.
    """

    def __init__(self, scores: Mapping[str, float]):
        for text, value in scores.items():
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise MalformedResponseError(
                    f"inline score for {text!r} is not a finite number: {value!r}"
                )
        self._scores = dict(scores)

    def score(self, texts: Sequence[str]) -> list[float]:
        out = []
        for text in texts:
            if text not in self._scores:
                raise MissingScoreError(f"no inline score for text {text!r}")
            out.append(float(self._scores[text]))
        return out


class LexiconStubScorer:
    """Deterministic test scorer: 1.0 if any trigger word occurs, else 0.0.

    Matching is whole-token after tokenization, so the trigger "hate"
    fires on "I hate this" but not on "whatever".
    """

    def __init__(self, trigger_words: Iterable[str], hit: float = 1.0, miss: float = 0.0):
        self._triggers = {w.lower() for w in trigger_words}
        self._hit = hit
        self._miss = miss

    def score(self, texts: Sequence[str]) -> list[float]:
        return [
            self._hit if any(t in self._triggers for t in tokenize(text)) else self._miss
            for text in texts
        ]


class RemoteScorer:
    """Client for a remote scorer: POST {"kind", "texts"} -> {"scores"}.

    Retries transport failures up to ``attempts`` times with exponential
    backoff, then raises ``ProviderUnavailableError``. A response of the
    wrong shape raises ``MalformedResponseError`` immediately; partial
    batches are never silently filled.
    """

    def __init__(
        self,
        url: str,
        kind: str,
        auth_token: str | None = None,
        timeout: float = 30.0,
        attempts: int = 3,
        backoff: float = 0.1,
        sleep=time.sleep,
    ):
        self.url = url
        self.kind = kind
        self.auth_token = auth_token
        self.timeout = timeout
        self.attempts = attempts
        self.backoff = backoff
        self._sleep = sleep

    def _post(self, payload: dict) -> dict:
        data = json.dumps(payload).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        request = urllib.request.Request(self.url, data=data, headers=headers)
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as response:
                    body = response.read()
                break
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                last_error = exc
                if attempt + 1 < self.attempts:
                    self._sleep(self.backoff * (2**attempt))
        else:
            raise ProviderUnavailableError(
                f"scorer at {self.url} unavailable after {self.attempts} attempts: {last_error}"
            )
        try:
            return json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedResponseError(f"scorer returned invalid JSON: {exc}") from exc

    def score(self, texts: Sequence[str]) -> list[float]:
        reply = self._post({"kind": self.kind, "texts": list(texts)})
        scores = reply.get("scores")
        if not isinstance(scores, list) or len(scores) != len(texts):
            raise MalformedResponseError(
                f"expected {len(texts)} scores, got {scores!r}"
            )
        out = []
        for value in scores:
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise MalformedResponseError(f"non-numeric score {value!r}")
            out.append(float(value))
        return out


class InlineEmbeddings:
    """Passthrough provider for embedding vectors precomputed upstream."""

    def __init__(self, vectors: Mapping[str, Sequence[float]]):
        self._vectors = {text: [float(v) for v in vec] for text, vec in vectors.items()}

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        out = []
        for text in texts:
            if text not in self._vectors:
                raise MissingEmbeddingError(f"no inline embedding for text {text!r}")
            out.append(list(self._vectors[text]))
        return out


class HashingEmbedder:
    """Deterministic bag-of-tokens embedding for tests and dry runs.

    Each token is hashed into one of ``dim - 1`` signed buckets; component
    0 counts tokens plus a constant bias so no text embeds to the zero
    vector. Identical texts always embed identically.
    """

    def __init__(self, dim: int = 16):
        if dim < 2:
            raise ConfigError("hashing embedder needs dim >= 2")
        self.dim = dim

    def _embed_one(self, text: str) -> list[float]:
        vector = [0.0] * self.dim
        tokens = tokenize(text)
        vector[0] = 1.0 + len(tokens)
        for token in tokens:
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            bucket = 1 + int.from_bytes(digest[:4], "big") % (self.dim - 1)
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vector[bucket] += sign
        return vector

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [self._embed_one(text) for text in texts]


class RemoteEmbedder(RemoteScorer):
    """Client for a remote embedder: POST {"kind", "texts"} -> {"embeddings"}."""

    def __init__(self, url: str, **kwargs):
        super().__init__(url, kind="embedding", **kwargs)

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        reply = self._post({"kind": self.kind, "texts": list(texts)})
        embeddings = reply.get("embeddings")
        if not isinstance(embeddings, list) or len(embeddings) != len(texts):
            raise MalformedResponseError(
                f"expected {len(texts)} embeddings, got {embeddings!r}"
            )
        out = []
        for vector in embeddings:
            if not isinstance(vector, list) or not vector:
                raise MalformedResponseError(f"invalid embedding {vector!r}")
            out.append([float(v) for v in vector])
        return out


class ScorerGateway:
    """Batched, clamped front door to all configured providers.

    Splits work into fixed-size batches executed on a bounded thread pool;
    batching is invisible to callers (scoring a list equals concatenating
    the scores of any partition of it). Scores outside [0, 1] are clamped
    with a warning so the downstream 0.5 thresholds stay meaningful.
    """

    def __init__(
        self,
        scorers: Mapping[str, object] | None = None,
        embedder: object | None = None,
        batch_size: int = 64,
        max_workers: int = 1,
    ):
        if batch_size < 1 or max_workers < 1:
            raise ConfigError("batch_size and max_workers must be >= 1")
        self._scorers = dict(scorers or {})
        self._embedder = embedder
        self.batch_size = batch_size
        self.max_workers = max_workers

    def _map_batches(self, func, texts: Sequence[str]) -> list:
        batches = [
            list(texts[i : i + self.batch_size])
            for i in range(0, len(texts), self.batch_size)
        ]
        if len(batches) <= 1 or self.max_workers == 1:
            results = [func(batch) for batch in batches]
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                results = list(pool.map(func, batches))
        return [item for batch in results for item in batch]

    def score_texts(self, kind: str, texts: Sequence[str]) -> list[float]:
        """Score *texts* with the provider configured for *kind*.

        Returns one value per text, order preserved, every value in [0, 1].
        """
        if kind not in self._scorers:
            raise ConfigError(f"no scorer configured for kind {kind!r}")
        provider = self._scorers[kind]
        raw = self._map_batches(provider.score, texts)
        out = []
        for value in raw:
            if value < 0.0 or value > 1.0:
                warnings.warn(
                    f"{kind} score {value!r} outside [0, 1]; clamped",
                    ClampedScoreWarning,
                    stacklevel=2,
                )
                value = min(1.0, max(0.0, value))
            out.append(float(value))
        return out

    def embed_texts(self, texts: Sequence[str]) -> list[list[float]]:
        """Embed *texts*; all vectors must share one dimension."""
        if self._embedder is None:
            raise ConfigError("no embedding provider configured")
        vectors = self._map_batches(self._embedder.embed, texts)
        dims = {len(v) for v in vectors}
        if len(dims) > 1:
            raise MalformedResponseError(
                f"inconsistent embedding dimensions in one run: {sorted(dims)}"
            )
        return vectors

    def has_scorer(self, kind: str) -> bool:
        return kind in self._scorers

    @property
    def has_embedder(self) -> bool:
        return self._embedder is not None
