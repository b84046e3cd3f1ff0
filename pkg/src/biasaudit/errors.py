"""Exception and warning types shared across the audit engine."""


class AuditError(Exception):
    """Base class for every error raised by this package."""


class LexiconError(AuditError):
    """Lexicon or substitution-mapping data is invalid."""


class EmptyInputError(AuditError):
    """A metric was asked to aggregate over zero records or pairs."""


class AllWordsSkippedError(AuditError):
    """Every target word had zero co-occurrence mass for every group."""


class MissingScoreError(AuditError):
    """A required precomputed score is absent for a text."""


class MissingEmbeddingError(AuditError):
    """A required embedding vector is absent for a text."""


class ZeroNormVectorError(AuditError):
    """Cosine similarity is undefined for a zero-norm embedding."""


class MissingLabelError(AuditError):
    """An error-based fairness metric needs ground-truth labels."""


class EmptyGroupError(AuditError):
    """No records were observed for a protected attribute group."""


class UndefinedRateError(AuditError):
    """A conditional rate has an empty conditioning set; the metric is
    not computable and must never be silently imputed as zero."""


class UnknownClassError(AuditError):
    """A sensitive class was requested that never occurs in the data."""


class ProviderUnavailableError(AuditError):
    """A remote scorer stayed unreachable after bounded retries."""


class MalformedResponseError(AuditError):
    """A scorer returned a response that violates the wire contract."""


class ConfigError(AuditError):
    """The run configuration is incomplete or inconsistent."""


class IngestError(AuditError):
    """Base class for input-file errors; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class MalformedLineError(IngestError):
    """A line is not valid JSON."""


class SchemaViolationError(IngestError):
    """A line parsed as JSON but violates the record schema."""


class DuplicateIdError(IngestError):
    """A record identifier occurred more than once in a file."""


class AuditWarning(UserWarning):
    """Base class for warnings surfaced into audit reports."""


class ClampedScoreWarning(AuditWarning):
    """A provider returned a score outside [0, 1]; it was clamped."""


class SkippedWordWarning(AuditWarning):
    """A target word had zero co-occurrence mass and was skipped."""


class InfiniteResultWarning(AuditWarning):
    """A log-ratio diverged because one group had zero mass."""


class ShortTextWarning(AuditWarning):
    """A text was too short for the 4-gram precision to be defined."""


class EmptyTextWarning(AuditWarning):
    """A pair contained an empty text; its similarity was taken as 0."""


class SmallSampleWarning(AuditWarning):
    """Fewer generations per prompt than the recommended default."""


class UnmappedTokenWarning(AuditWarning):
    """A prompt was skipped because a protected word has no mapping."""


class ConflictingScoreWarning(AuditWarning):
    """The same text carried two different inline scores."""
