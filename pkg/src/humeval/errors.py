"""Exception types shared across the toolkit."""


class HumevalError(Exception):
    """Base class for all toolkit errors."""


class CorpusParseError(HumevalError):
    """A corpus/predictions/laughter/labels file could not be parsed."""

    def __init__(self, path, line_number, message):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class ValidationError(HumevalError):
    """A loaded object violates a structural invariant."""


class ContractError(HumevalError):
    """A caller or plug-in violated an interface contract."""


class DegenerateInputError(HumevalError):
    """Numerical input has no usable structure (e.g. all-zero matrix)."""


class UnscorableError(HumevalError):
    """A transcript cannot be scored (no ground truth)."""


class TimelineError(HumevalError):
    """Sentence timings are missing or unusable for alignment."""


class EmbeddingLookupError(HumevalError):
    """A precomputed embedding file has no entry for a text."""


class TransportError(HumevalError):
    """An HTTP embedding request failed after retries."""

    def __init__(self, message, attempts=1, last_status=None):
        self.attempts = attempts
        self.last_status = last_status
        super().__init__(message)
