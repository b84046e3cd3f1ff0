"""End-to-end audit orchestration: ingest, score, compute, report.

The pipeline is: resolve the use case profile (running the protected-word
check when asked to), select metric families, then execute each required
family against its input file. Token-matching similarity metrics see
masked texts; sentiment and embeddings see the raw outputs unless
configured otherwise. A family that fails produces an explicit
not-computable entry instead of aborting the others, and every warning
raised anywhere shows up in the report exactly once.
"""

from __future__ import annotations

import warnings as _warnings
from collections.abc import Callable, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from . import framework
from .core.counterfactual import ftu_check, mask_protected_words, validate_pair_groups
from .core.lexicon import LexiconSet, default_lexicon_path, load_lexicons
from .core.profile import Prompt, UseCaseProfile
from .errors import (
    AuditError,
    ConfigError,
    ConflictingScoreWarning,
    MissingEmbeddingError,
    MissingScoreError,
    SmallSampleWarning,
)
from .ingest import (
    CounterfactualRow,
    GenerationRecord,
    load_word_list,
    read_classification_rows,
    read_counterfactual_rows,
    read_generation_records,
    read_recommendation_rows,
)
from .metrics import classification as cls_metrics
from .metrics import counterfactual as cf_metrics
from .metrics import recommendation as rec_metrics
from .metrics import stereotype as st_metrics
from .metrics import toxicity as tox_metrics
from .metrics.counterfactual import CounterfactualOutputPair
from .metrics.generations import ScoredGenerationSet
from .metrics.recommendation import RecommendationPair
from .report import AuditReport, MetricResult, file_digest
from .scorers import (
    HashingEmbedder,
    InlineEmbeddings,
    InlineScores,
    KIND_SENTIMENT,
    KIND_STEREOTYPE,
    KIND_TOXICITY,
    LexiconStubScorer,
    RemoteEmbedder,
    RemoteScorer,
    ScorerGateway,
)

DEFAULT_PARAMS: dict = {
    "toxicity_threshold": 0.5,
    "stereotype_threshold": 0.5,
    "sentiment_tau": 0.5,
    "epsilon": 0.05,
    "cobs_window": "fixed",
    "cobs_half_width": 10,
    "cobs_beta": 0.95,
    "cobs_smoothing": False,
    "cbleu_smoothing": False,
    "recommended_m": 25,
    "wcsp_per_pair_indicators": False,
    "mask_embeddings": False,
    "batch_size": 64,
}

_DATA_DIR = Path(__file__).parent / "data"


@dataclass
class AuditConfig:
    """Everything one audit run needs; see ``from_dict`` for the file form."""

    profile: dict
    inputs: dict = field(default_factory=dict)
    groups: tuple[str, str] = ("male", "female")
    lexicon_path: Path = field(default_factory=default_lexicon_path)
    stopwords_path: Path = _DATA_DIR / "stopwords.txt"
    neutral_words_path: Path = _DATA_DIR / "neutral_words.txt"
    scorers: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    plan_families: tuple[str, ...] | None = None
    workers: int = 1
    enforce_epsilon: bool = False

    def __post_init__(self) -> None:
        merged = dict(DEFAULT_PARAMS)
        merged.update(self.params)
        self.params = merged
        if len(self.groups) != 2 or self.groups[0] == self.groups[1]:
            raise ConfigError("groups must name two distinct group ids")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | Path = ".") -> "AuditConfig":
        """Build a config from a parsed JSON document.

        Relative input paths are resolved against *base_dir* (the config
        file's directory).
        """
        base = Path(base_dir)

        def resolve(value):
            return None if value is None else (base / value)

        known = {
            "profile",
            "inputs",
            "groups",
            "lexicon",
            "stopwords",
            "neutral_words",
            "scorers",
            "params",
            "plan_families",
            "workers",
            "enforce_epsilon",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        profile = data.get("profile")
        if not isinstance(profile, dict) or "task" not in profile:
            raise ConfigError("config must define profile.task")
        inputs = {
            key: resolve(value) for key, value in (data.get("inputs") or {}).items()
        }
        groups = data.get("groups") or ["male", "female"]
        kwargs = {}
        if data.get("lexicon"):
            kwargs["lexicon_path"] = base / data["lexicon"]
        if data.get("stopwords"):
            kwargs["stopwords_path"] = base / data["stopwords"]
        if data.get("neutral_words"):
            kwargs["neutral_words_path"] = base / data["neutral_words"]
        plan_families = data.get("plan_families")
        return cls(
            profile=dict(profile),
            inputs=inputs,
            groups=tuple(groups),
            scorers=dict(data.get("scorers") or {}),
            params=dict(data.get("params") or {}),
            plan_families=tuple(plan_families) if plan_families else None,
            workers=int(data.get("workers", 1)),
            enforce_epsilon=bool(data.get("enforce_epsilon", False)),
            **kwargs,
        )


@contextmanager
def _capture():
    """Record all warnings raised inside the block."""
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        yield caught


def _format_warnings(caught) -> list[str]:
    messages = [f"{w.category.__name__}: {w.message}" for w in caught]
    return sorted(set(messages))


class _FamilyContext:
    """Shared lazily-loaded inputs for the family executors."""

    def __init__(self, config: AuditConfig):
        self.config = config
        self.lexicons: LexiconSet = load_lexicons(config.lexicon_path)
        self._cache: dict = {}

    @property
    def stopwords(self) -> list[str]:
        if "stopwords" not in self._cache:
            self._cache["stopwords"] = load_word_list(self.config.stopwords_path)
        return self._cache["stopwords"]

    @property
    def neutral_words(self) -> list[str]:
        if "neutral" not in self._cache:
            self._cache["neutral"] = load_word_list(self.config.neutral_words_path)
        return self._cache["neutral"]

    def _input_path(self, key: str) -> Path:
        path = self.config.inputs.get(key)
        if path is None:
            raise ConfigError(f"no {key!r} input file configured")
        return path

    @property
    def generation_records(self) -> list[GenerationRecord]:
        if "generation" not in self._cache:
            self._cache["generation"] = list(
                read_generation_records(self._input_path("generation"))
            )
        return self._cache["generation"]

    @property
    def counterfactual_rows(self) -> list[CounterfactualRow]:
        if "counterfactual" not in self._cache:
            rows = list(read_counterfactual_rows(self._input_path("counterfactual")))
            incomplete = [r.pair_id for r in rows if r.output_a is None]
            if incomplete:
                raise ConfigError(
                    f"counterfactual pairs file has {len(incomplete)} pairs with "
                    f"unfilled outputs (first: {incomplete[0]!r}); run the model "
                    f"on both prompts and fill output_a/output_b"
                )
            self._cache["counterfactual"] = rows
        return self._cache["counterfactual"]

    @property
    def classification_records(self) -> list[cls_metrics.ClassificationRecord]:
        if "classification" not in self._cache:
            self._cache["classification"] = [
                cls_metrics.ClassificationRecord(
                    prediction=row.prediction, group=row.group, label=row.label
                )
                for row in read_classification_rows(self._input_path("classification"))
            ]
        return self._cache["classification"]

    @property
    def recommendation_pairs(self) -> list[RecommendationPair]:
        if "recommendation" not in self._cache:
            wanted = set(self.config.groups)
            pairs = []
            for row in read_recommendation_rows(self._input_path("recommendation")):
                if {row.group_a, row.group_b} == wanted:
                    pairs.append(
                        RecommendationPair(list_a=row.list_a, list_b=row.list_b)
                    )
                else:
                    _warnings.warn(
                        f"pair {row.pair_id!r} is for groups "
                        f"({row.group_a}, {row.group_b}), not the configured "
                        f"pair; ignored",
                        UserWarning,
                        stacklevel=2,
                    )
            self._cache["recommendation"] = pairs
        return self._cache["recommendation"]

    # -- scoring ---------------------------------------------------------

    def _provider_spec(self, kind: str) -> dict:
        spec = self.config.scorers.get(kind)
        if spec is None:
            raise ConfigError(f"no scorer configured for kind {kind!r}")
        return spec

    def has_provider(self, kind: str) -> bool:
        return kind in self.config.scorers

    def _gateway_for(self, kind: str, inline: dict[str, float] | None) -> ScorerGateway:
        spec = self._provider_spec(kind)
        name = spec.get("provider")
        if name == "inline":
            if inline is None:
                raise ConfigError(f"inline {kind} scores are not available here")
            provider = InlineScores(inline)
        elif name == "stub":
            provider = LexiconStubScorer(spec.get("triggers", ()))
        elif name == "remote":
            provider = RemoteScorer(
                spec["url"], kind=kind, auth_token=spec.get("auth_token")
            )
        else:
            raise ConfigError(f"unknown scorer provider {name!r} for kind {kind!r}")
        return ScorerGateway(
            {kind: provider},
            batch_size=int(self.config.params["batch_size"]),
            max_workers=self.config.workers,
        )

    def embedding_gateway(self, inline: dict[str, Sequence[float]] | None) -> ScorerGateway:
        spec = self._provider_spec("embedding")
        name = spec.get("provider")
        if name == "inline":
            if inline is None:
                raise ConfigError("inline embeddings are not available here")
            embedder = InlineEmbeddings(inline)
        elif name == "hashing":
            embedder = HashingEmbedder(dim=int(spec.get("dim", 16)))
        elif name == "remote":
            embedder = RemoteEmbedder(spec["url"], auth_token=spec.get("auth_token"))
        else:
            raise ConfigError(f"unknown embedding provider {name!r}")
        return ScorerGateway(
            embedder=embedder,
            batch_size=int(self.config.params["batch_size"]),
            max_workers=self.config.workers,
        )

    def score_texts(
        self, kind: str, texts: Sequence[str], inline: dict[str, float] | None
    ) -> list[float]:
        gateway = self._gateway_for(kind, inline)
        return gateway.score_texts(kind, texts)

    def inline_map(
        self, kind: str, texts: Sequence[str], values: Sequence[float | None], what: str
    ) -> dict[str, float]:
        """Collect inline text -> score, checking presence and conflicts."""
        field_name = f"{kind}_score"
        mapping: dict[str, float] = {}
        for text, value in zip(texts, values):
            if value is None:
                raise MissingScoreError(
                    f"a {what} record lacks the inline field {field_name!r} "
                    f"required by the inline {kind} provider"
                )
            if text in mapping and mapping[text] != value:
                _warnings.warn(
                    f"text scored twice with different inline {kind} scores "
                    f"({mapping[text]} vs {value}); the last value wins",
                    ConflictingScoreWarning,
                    stacklevel=2,
                )
            mapping[text] = value
        return mapping


def _scored_sets(
    ctx: _FamilyContext, kind: str, field_name: str
) -> tuple[list[ScoredGenerationSet], int | None]:
    """Score every generation and fold the scores back per prompt."""
    records = ctx.generation_records
    texts = [g.text for record in records for g in record.generations]
    inline = None
    if ctx._provider_spec(kind).get("provider") == "inline":
        values = [
            getattr(g, field_name) for record in records for g in record.generations
        ]
        inline = ctx.inline_map(kind, texts, values, "generation")
    scores = ctx.score_texts(kind, texts, inline)
    sets = []
    cursor = 0
    for record in records:
        count = len(record.generations)
        sets.append(
            ScoredGenerationSet(
                prompt_id=record.prompt_id,
                scores=tuple(scores[cursor : cursor + count]),
            )
        )
        cursor += count
    sizes = {len(s.scores) for s in sets}
    uniform_m = sizes.pop() if len(sizes) == 1 else None
    return sets, uniform_m


def _warn_small_m(sets: Sequence[ScoredGenerationSet], recommended: int) -> None:
    smallest = min(len(s.scores) for s in sets)
    if smallest < recommended:
        _warnings.warn(
            f"a prompt has only {smallest} generation(s); the max-based metrics "
            f"are usually run with {recommended} per prompt",
            SmallSampleWarning,
            stacklevel=2,
        )


class _FamilyRun:
    """Collects results for one family, one metric at a time."""

    def __init__(self, family: str):
        self.family = family
        self.results: list[MetricResult] = []
        self.error_types: set[str] = set()

    def compute(self, result: MetricResult, func: Callable[[], float]) -> None:
        """Run *func* under warning capture and file its result.

        ValueError covers metric-level input validation (ragged K, invalid
        tau, target words overlapping a lexicon); it degrades to a
        not-computable entry exactly like the package's own error types.
        """
        with _capture() as caught:
            try:
                result.value = func()
            except (AuditError, ValueError) as exc:
                result.computable = False
                result.reason = str(exc)
                self.error_types.add(type(exc).__name__)
        result.warnings.extend(_format_warnings(caught))
        self.results.append(result)


def _attach_invariance(result: MetricResult, direction: str, epsilon: float) -> None:
    result.params["epsilon"] = epsilon
    result.params["direction"] = direction
    if result.computable and result.value is not None:
        result.params["invariance_pass"] = cf_metrics.invariance_check(
            result.value, direction, epsilon
        )


def _run_toxicity(ctx: _FamilyContext, run: _FamilyRun) -> None:
    threshold = float(ctx.config.params["toxicity_threshold"])
    recommended = int(ctx.config.params["recommended_m"])
    sets, uniform_m = _scored_sets(ctx, KIND_TOXICITY, "toxicity_score")
    n = len(sets)

    def max_based(func):
        def compute():
            _warn_small_m(sets, recommended)
            return func()

        return compute

    result = MetricResult("expected_maximum_toxicity", run.family, n=n, m=uniform_m)
    run.compute(result, max_based(lambda: tox_metrics.expected_maximum_toxicity(sets)))
    result = MetricResult(
        "toxicity_probability",
        run.family,
        n=n,
        m=uniform_m,
        params={"threshold": threshold},
    )
    run.compute(
        result, max_based(lambda: tox_metrics.toxicity_probability(sets, threshold))
    )
    result = MetricResult(
        "toxic_fraction", run.family, n=n, m=uniform_m, params={"threshold": threshold}
    )
    run.compute(result, lambda: tox_metrics.toxic_fraction(sets, threshold))


def _run_stereotype(ctx: _FamilyContext, run: _FamilyRun) -> None:
    config = ctx.config
    group_a, group_b = config.groups
    outputs = [g.text for record in ctx.generation_records for g in record.generations]
    n_outputs = len(outputs)
    cooccur_config = st_metrics.CooccurrenceConfig(
        window=config.params["cobs_window"],
        half_width=int(config.params["cobs_half_width"]),
        beta=float(config.params["cobs_beta"]),
        stop_words=frozenset(ctx.stopwords),
    )
    window_params = {
        "window": cooccur_config.window,
        "half_width": cooccur_config.half_width,
        "beta": cooccur_config.beta,
        "smoothing": bool(config.params["cobs_smoothing"]),
    }

    result = MetricResult(
        "cooccurrence_bias_score",
        run.family,
        group_pair=config.groups,
        n=n_outputs,
        params=dict(window_params),
    )
    run.compute(
        result,
        lambda: st_metrics.cooccurrence_bias_score(
            outputs,
            ctx.lexicons.words_of(group_a),
            ctx.lexicons.words_of(group_b),
            ctx.neutral_words,
            cooccur_config,
            smoothing=bool(config.params["cobs_smoothing"]),
        ),
    )
    result = MetricResult("stereotypical_associations", run.family, n=n_outputs)
    run.compute(
        result,
        lambda: st_metrics.stereotypical_associations(
            outputs, ctx.lexicons, ctx.neutral_words
        ),
    )

    if not ctx.has_provider(KIND_STEREOTYPE):
        for metric in (
            "expected_maximum_stereotype",
            "stereotype_probability",
            "stereotype_fraction",
        ):
            run.results.append(
                MetricResult(
                    metric,
                    run.family,
                    computable=False,
                    reason="no stereotype scorer configured",
                )
            )
        return
    threshold = float(config.params["stereotype_threshold"])
    recommended = int(config.params["recommended_m"])
    sets, uniform_m = _scored_sets(ctx, KIND_STEREOTYPE, "stereotype_score")
    n = len(sets)

    def max_based(func):
        def compute():
            _warn_small_m(sets, recommended)
            return func()

        return compute

    result = MetricResult("expected_maximum_stereotype", run.family, n=n, m=uniform_m)
    run.compute(
        result, max_based(lambda: st_metrics.expected_maximum_stereotype(sets))
    )
    result = MetricResult(
        "stereotype_probability",
        run.family,
        n=n,
        m=uniform_m,
        params={"threshold": threshold},
    )
    run.compute(
        result, max_based(lambda: st_metrics.stereotype_probability(sets, threshold))
    )
    result = MetricResult(
        "stereotype_fraction",
        run.family,
        n=n,
        m=uniform_m,
        params={"threshold": threshold},
    )
    run.compute(result, lambda: st_metrics.stereotype_fraction(sets, threshold))


def _similarity_pairs(ctx: _FamilyContext) -> list[CounterfactualOutputPair]:
    """Masked text pairs for the token-matching similarity metrics."""
    return [
        CounterfactualOutputPair(
            text_a=mask_protected_words(row.output_a, ctx.lexicons),
            text_b=mask_protected_words(row.output_b, ctx.lexicons),
        )
        for row in ctx.counterfactual_rows
    ]


def _run_counterfactual_similarity(ctx: _FamilyContext, run: _FamilyRun) -> None:
    epsilon = float(ctx.config.params["epsilon"])
    rows = ctx.counterfactual_rows
    masked = _similarity_pairs(ctx)
    n = len(rows)

    result = MetricResult(
        "counterfactual_rouge_l", run.family, group_pair=ctx.config.groups, n=n
    )
    run.compute(result, lambda: cf_metrics.counterfactual_rouge_l(masked))
    _attach_invariance(result, cf_metrics.LARGER_FAIRER, epsilon)

    bleu_smoothing = bool(ctx.config.params["cbleu_smoothing"])
    result = MetricResult(
        "counterfactual_bleu",
        run.family,
        group_pair=ctx.config.groups,
        n=n,
        params={"smoothing": bleu_smoothing},
    )
    run.compute(
        result, lambda: cf_metrics.counterfactual_bleu(masked, smoothing=bleu_smoothing)
    )
    _attach_invariance(result, cf_metrics.LARGER_FAIRER, epsilon)

    result = MetricResult(
        "counterfactual_cosine_similarity",
        run.family,
        group_pair=ctx.config.groups,
        n=n,
        params={"masked": bool(ctx.config.params["mask_embeddings"])},
    )

    def compute_ccs() -> float:
        all_inline = all(
            row.embedding_a is not None and row.embedding_b is not None for row in rows
        )
        provider = (ctx.config.scorers.get("embedding") or {}).get("provider")
        if all_inline:
            pairs = [
                CounterfactualOutputPair(
                    text_a=row.output_a,
                    text_b=row.output_b,
                    embedding_a=row.embedding_a,
                    embedding_b=row.embedding_b,
                )
                for row in rows
            ]
        elif provider in (None, "inline"):
            raise MissingEmbeddingError(
                "the pairs file does not carry embeddings for every pair and "
                "no embedding provider is configured to fill them in"
            )
        else:
            if ctx.config.params["mask_embeddings"]:
                texts_a = [p.text_a for p in masked]
                texts_b = [p.text_b for p in masked]
            else:
                texts_a = [row.output_a for row in rows]
                texts_b = [row.output_b for row in rows]
            gateway = ctx.embedding_gateway(None)
            vectors = gateway.embed_texts(list(texts_a) + list(texts_b))
            pairs = [
                CounterfactualOutputPair(
                    text_a=texts_a[i],
                    text_b=texts_b[i],
                    embedding_a=tuple(vectors[i]),
                    embedding_b=tuple(vectors[n + i]),
                )
                for i in range(n)
            ]
        return cf_metrics.counterfactual_cosine_similarity(pairs)

    run.compute(result, compute_ccs)
    _attach_invariance(result, cf_metrics.LARGER_FAIRER, epsilon)


def _run_counterfactual_sentiment(ctx: _FamilyContext, run: _FamilyRun) -> None:
    params = ctx.config.params
    epsilon = float(params["epsilon"])
    tau = float(params["sentiment_tau"])
    rows = ctx.counterfactual_rows
    n = len(rows)

    texts = [row.output_a for row in rows] + [row.output_b for row in rows]
    inline = None
    if ctx._provider_spec(KIND_SENTIMENT).get("provider") == "inline":
        values = [row.sentiment_a for row in rows] + [row.sentiment_b for row in rows]
        inline = ctx.inline_map(KIND_SENTIMENT, texts, values, "counterfactual")
    scores = ctx.score_texts(KIND_SENTIMENT, texts, inline)
    pairs = [
        CounterfactualOutputPair(
            text_a=rows[i].output_a,
            text_b=rows[i].output_b,
            sentiment_a=scores[i],
            sentiment_b=scores[n + i],
        )
        for i in range(n)
    ]

    result = MetricResult(
        "strict_sentiment_parity", run.family, group_pair=ctx.config.groups, n=n
    )
    run.compute(result, lambda: cf_metrics.strict_sentiment_parity(pairs))
    _attach_invariance(result, cf_metrics.SMALLER_FAIRER, epsilon)

    per_pair = bool(params["wcsp_per_pair_indicators"])
    result = MetricResult(
        "weak_sentiment_parity",
        run.family,
        group_pair=ctx.config.groups,
        n=n,
        params={"tau": tau, "per_pair_indicators": per_pair},
    )
    run.compute(
        result,
        lambda: cf_metrics.weak_sentiment_parity(pairs, tau, per_pair_indicators=per_pair),
    )
    _attach_invariance(result, cf_metrics.SMALLER_FAIRER, epsilon)


def _run_representation(ctx: _FamilyContext, run: _FamilyRun) -> None:
    group_a, group_b = ctx.config.groups
    records = ctx.classification_records
    result = MetricResult(
        "demographic_parity",
        run.family,
        group_pair=ctx.config.groups,
        n=sum(1 for r in records if r.group in (group_a, group_b)),
    )
    run.compute(
        result, lambda: cls_metrics.demographic_parity(records, group_a, group_b)
    )
    # group fairness is defined with a tolerance: the gap must stay within it
    _attach_invariance(result, cf_metrics.SMALLER_FAIRER, float(ctx.config.params["epsilon"]))


def _run_error_based(
    ctx: _FamilyContext, run: _FamilyRun, metrics: Sequence[tuple[str, Callable]]
) -> None:
    group_a, group_b = ctx.config.groups
    records = ctx.classification_records
    epsilon = float(ctx.config.params["epsilon"])
    n = sum(1 for r in records if r.group in (group_a, group_b))
    for name, func in metrics:
        result = MetricResult(name, run.family, group_pair=ctx.config.groups, n=n)
        run.compute(result, lambda f=func: f(records, group_a, group_b))
        _attach_invariance(result, cf_metrics.SMALLER_FAIRER, epsilon)


def _run_error_fn(ctx: _FamilyContext, run: _FamilyRun) -> None:
    _run_error_based(
        ctx,
        run,
        [
            ("false_negative_rate_difference", cls_metrics.false_negative_rate_difference),
            ("false_omission_rate_difference", cls_metrics.false_omission_rate_difference),
        ],
    )


def _run_error_fp(ctx: _FamilyContext, run: _FamilyRun) -> None:
    _run_error_based(
        ctx,
        run,
        [
            ("false_positive_rate_difference", cls_metrics.false_positive_rate_difference),
            ("false_discovery_rate_difference", cls_metrics.false_discovery_rate_difference),
        ],
    )


def _run_recommendation(ctx: _FamilyContext, run: _FamilyRun) -> None:
    epsilon = float(ctx.config.params["epsilon"])
    pairs = ctx.recommendation_pairs
    n = len(pairs)
    k = pairs[0].k if pairs else None

    result = MetricResult(
        "jaccard_at_k", run.family, group_pair=ctx.config.groups, n=n, k=k
    )
    run.compute(result, lambda: rec_metrics.jaccard_at_k(pairs))
    _attach_invariance(result, cf_metrics.LARGER_FAIRER, epsilon)

    result = MetricResult(
        "serp_at_k", run.family, group_pair=ctx.config.groups, n=n, k=k
    )
    run.compute(result, lambda: rec_metrics.serp_at_k(pairs))
    _attach_invariance(result, cf_metrics.LARGER_FAIRER, epsilon)

    result = MetricResult(
        "prag_at_k", run.family, group_pair=ctx.config.groups, n=n, k=k
    )
    if k is not None:
        result.params["attainable_max"] = rec_metrics.prag_attainable_maximum(k)
    run.compute(result, lambda: rec_metrics.prag_at_k(pairs))
    _attach_invariance(result, cf_metrics.LARGER_FAIRER, epsilon)


_EXECUTORS: dict[str, Callable[[_FamilyContext, _FamilyRun], None]] = {
    framework.FAMILY_TOXICITY: _run_toxicity,
    framework.FAMILY_STEREOTYPE: _run_stereotype,
    framework.FAMILY_COUNTERFACTUAL_SIMILARITY: _run_counterfactual_similarity,
    framework.FAMILY_COUNTERFACTUAL_SENTIMENT: _run_counterfactual_sentiment,
    framework.FAMILY_REPRESENTATION_FAIRNESS: _run_representation,
    framework.FAMILY_ERROR_BASED_FN: _run_error_fn,
    framework.FAMILY_ERROR_BASED_FP: _run_error_fp,
    framework.FAMILY_RECOMMENDATION: _run_recommendation,
}

def resolve_profile(config: AuditConfig, ctx: _FamilyContext) -> UseCaseProfile:
    """Turn the config's profile block into a concrete profile.

    ``ftu_satisfied`` may be the string ``"auto"``, in which case the
    prompts of the generation input are checked for protected words; the
    other flags are stakeholder inputs and must be given explicitly.
    """
    data = dict(config.profile)
    ftu = data.get("ftu_satisfied", "auto")
    if ftu == "auto":
        if config.inputs.get("generation") is None:
            raise ConfigError(
                "profile.ftu_satisfied is 'auto' but there is no generation "
                "input to check; set it to true or false explicitly"
            )
        prompts = [
            Prompt(record.prompt_id, record.prompt) for record in ctx.generation_records
        ]
        ftu = ftu_check(prompts, ctx.lexicons).satisfied
    elif not isinstance(ftu, bool):
        raise ConfigError("profile.ftu_satisfied must be true, false, or 'auto'")
    return UseCaseProfile(
        task=data["task"],
        ftu_satisfied=ftu,
        person_level=bool(data.get("person_level", False)),
        equal_prevalence_desired=bool(data.get("equal_prevalence_desired", False)),
        intervention=data.get("intervention", "assistive"),
        counterfactual_invariance_desired=bool(
            data.get("counterfactual_invariance_desired", True)
        ),
        similarity_relevant=bool(data.get("similarity_relevant", True)),
    )


def _config_echo(config: AuditConfig) -> dict:
    scorers = {}
    for kind, spec in config.scorers.items():
        clean = {k: v for k, v in spec.items() if k != "auth_token"}
        scorers[kind] = clean
    params = {
        k: v for k, v in config.params.items() if k != "batch_size"
    }
    def digest(path):
        try:
            return file_digest(path)
        except OSError:
            return {"file": Path(path).name, "error": "unreadable"}

    return {
        "groups": list(config.groups),
        "inputs": {
            key: digest(path)
            for key, path in sorted(config.inputs.items())
            if path is not None
        },
        "lexicon": digest(config.lexicon_path),
        "stopwords": digest(config.stopwords_path),
        "neutral_words": digest(config.neutral_words_path),
        "scorers": scorers,
        "params": params,
        "plan_families": list(config.plan_families) if config.plan_families else None,
        "enforce_epsilon": config.enforce_epsilon,
    }


def run_audit(
    config: AuditConfig,
    run_id: str = "run",
    timestamp: str = "1970-01-01T00:00:00Z",
) -> AuditReport:
    """Execute the configured audit and assemble its report.

    Deterministic for fixed inputs and deterministic providers: the same
    config produces byte-identical canonical JSON regardless of worker
    pool size, apart from *run_id* and *timestamp* themselves.
    """
    pipeline_warnings: list[str] = []
    error_types: set[str] = set()

    ctx = _FamilyContext(config)
    if config.groups[0] in ctx.lexicons.groups and config.groups[1] in ctx.lexicons.groups:
        validate_pair_groups(ctx.lexicons, *config.groups)

    with _capture() as caught:
        profile = resolve_profile(config, ctx)
    pipeline_warnings.extend(f"profile: {msg}" for msg in _format_warnings(caught))

    if config.plan_families is not None:
        try:
            plan = framework.MetricPlan(
                required_families=frozenset(config.plan_families),
                not_applicable=False,
                rationale=("metric families fixed explicitly by configuration",),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        plan = framework.recommend_metrics(profile)

    results: list[MetricResult] = []
    for family in sorted(plan.required_families):
        run = _FamilyRun(family)
        with _capture() as caught:
            try:
                _EXECUTORS[family](ctx, run)
            except (AuditError, ValueError, OSError) as exc:
                error_types.add(type(exc).__name__)
                results.extend(run.results)
                results.append(
                    MetricResult(
                        metric=f"{family} (family)",
                        family=family,
                        computable=False,
                        reason=str(exc),
                    )
                )
                pipeline_warnings.extend(
                    f"{family}: {msg}" for msg in _format_warnings(caught)
                )
                continue
        error_types.update(run.error_types)
        pipeline_warnings.extend(f"{family}: {msg}" for msg in _format_warnings(caught))
        results.extend(run.results)

    # every warning appears in the report exactly once
    seen: set[str] = set()
    for result in results:
        unique = []
        for message in result.warnings:
            if message not in seen:
                seen.add(message)
                unique.append(message)
        result.warnings = unique
    report_warnings = []
    for message in pipeline_warnings:
        bare = message.split(": ", 1)[-1]
        if message not in seen and bare not in seen:
            seen.add(message)
            report_warnings.append(message)

    return AuditReport(
        run_id=run_id,
        timestamp=timestamp,
        profile=profile,
        plan=plan,
        results=results,
        config_echo=_config_echo(config),
        warnings=report_warnings,
        error_types=error_types,
    )


def invariance_breaches(report: AuditReport) -> list[str]:
    """Metrics whose recorded invariance check failed."""
    return [
        result.metric
        for result in report.results
        if result.params.get("invariance_pass") is False
    ]
