"""Exception hierarchy.

Three categories map onto the CLI exit codes: ValidationError -> 1,
NumericError -> 2, IoError -> 3.
"""


class GraphMIError(Exception):
    """Base class for all library errors."""


class ValidationError(GraphMIError):
    """Input data or configuration violates a documented precondition."""


class NumericError(GraphMIError):
    """A numerical computation failed or produced a degenerate result."""


class IoError(GraphMIError):
    """Reading or writing an artifact failed."""


# --- validation ---------------------------------------------------------


class DimensionMismatch(ValidationError):
    pass


class ZeroVarianceChannel(ValidationError):
    def __init__(self, channel: int):
        self.channel = channel
        super().__init__(f"channel {channel} has zero variance over the supplied samples")


class InvalidBand(ValidationError):
    pass


class EpochOutOfBounds(ValidationError):
    def __init__(self, marker_index: int, message: str = ""):
        self.marker_index = marker_index
        super().__init__(message or f"epoch window for marker {marker_index} leaves the recording")


class MalformedMeta(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class BadMarker(ValidationError):
    pass


class EmptyBand(ValidationError):
    pass


class BadCutoff(ValidationError):
    pass


class MissingClass(ValidationError):
    def __init__(self, label: int):
        self.label = label
        super().__init__(f"no labeled trials for class {label}")


class SingleClassInput(ValidationError):
    pass


class NonFiniteFeature(ValidationError):
    pass


class TooFewTrials(ValidationError):
    pass


class ConfigInvalid(ValidationError):
    pass


# --- numeric ------------------------------------------------------------


class EigenFailure(NumericError):
    pass


class DegenerateColumn(NumericError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} is numerically zero after removing the mean component")


class TraceUnderflow(NumericError):
    pass


class RankDeficient(NumericError):
    def __init__(self, indices):
        self.indices = list(indices)
        super().__init__(
            f"summed covariance is rank deficient in directions {self.indices}; "
            "pass allow_rank_reduction=True to discard them"
        )


class TrainingDidNotConverge(NumericError):
    pass


class NonFiniteOutput(NumericError):
    pass


# --- io -----------------------------------------------------------------


class IoFailure(IoError):
    pass


class PipelineStageError(GraphMIError):
    """Wraps a module error with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


def exit_code_for(err: Exception) -> int:
    """CLI exit code for an exception (0 is reserved for success)."""
    if isinstance(err, PipelineStageError):
        err = err.cause
    if isinstance(err, ValidationError):
        return 1
    if isinstance(err, NumericError):
        return 2
    if isinstance(err, (IoError, OSError)):
        return 3
    return 1
