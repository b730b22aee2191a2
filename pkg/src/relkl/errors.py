"""Exception types shared across the package."""

from __future__ import annotations


class RelklError(Exception):
    """Base class for every error raised by this package."""


class EmptySample(RelklError):
    """An estimator was given a score sample with no entries."""


class NonFiniteInput(RelklError):
    """A log-density is NaN or infinite.

    Carries the id of the offending entry so callers can locate it in
    their dump files.
    """

    def __init__(self, entry_id: str, value: float):
        self.entry_id = entry_id
        self.value = value
        super().__init__(f"non-finite log-density for id {entry_id!r}: {value!r}")


class SampleTooSmall(RelklError):
    """Fewer observations than the requested statistic needs."""


class ZeroVariance(RelklError):
    """All log-density differences are identical.

    This signals that the two log-density streams are affinely identical;
    no variance-based interval can be formed.
    """


class InvalidAlpha(RelklError):
    """Confidence level alpha must lie strictly inside (0, 1)."""


class UnsupportedOrder(RelklError):
    """Hermite order outside the implemented range."""


class DimensionMismatch(RelklError):
    """Vector or model dimensions do not agree."""


class DuplicatePoint(RelklError):
    """A zero nearest-neighbor distance was encountered.

    Duplicate points make distance-ratio estimators degenerate, so they
    are rejected rather than fudged.
    """


class UnequalSizes(RelklError):
    """The empirical transport cost needs equal-size samples."""


class TooLarge(RelklError):
    """Input exceeds the supported size for an exact O(n^3) computation."""


class InvalidBlock(RelklError):
    """Subsampling block size must satisfy 1 <= b < n."""


class InvalidGrid(RelklError):
    """Malformed grid specification."""


class ParseError(RelklError):
    """A score file failed to parse; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class JoinError(RelklError):
    """The two score files do not cover the same set of ids."""


class ConfigError(RelklError):
    """An experiment configuration field is missing or invalid."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
