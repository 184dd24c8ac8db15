"""Exception hierarchy for the toolkit.

Errors fall into two toolkit families so the CLI can map them onto exit
codes: validation errors (bad parameters, invariant violations, malformed
config or data files -> exit 2) and computation errors (a well-formed
request that cannot produce a valid result -> exit 3).  Plain ``OSError``
covers I/O failures (exit 4).
"""

from __future__ import annotations


class TrenchJJError(Exception):
    """Base class for all toolkit-specific errors."""


class ValidationError(TrenchJJError, ValueError):
    """Invalid parameter, violated invariant, or malformed configuration."""


class SameSideDeposition(ValidationError):
    """Both deposition tilts approach the trench from the same azimuth."""


class ParseError(ValidationError):
    """A config or data file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class MissingSection(ValidationError):
    """The requested operation needs a config section that is not present."""


class EmptyTrace(ValidationError):
    """Trace file holds no usable samples."""


class TraceTooShort(ValidationError):
    """Trace has too few samples for the requested statistic."""


class GapError(ValidationError):
    """Trace timestamps are not uniform within the 50% tolerance."""

    def __init__(self, message: str, indices: tuple[int, ...] = ()):
        self.indices = indices
        super().__init__(message)


class ComputationError(TrenchJJError):
    """A well-formed computation could not produce a valid result."""


class UnphysicalDephasing(ComputationError):
    """Echo time exceeds twice the relaxation time beyond tolerance."""


class NonConvergence(ComputationError):
    """Least-squares fit exhausted its iteration budget."""


class DegenerateData(ComputationError):
    """Signal shows no resolvable decay (range at or below the noise floor)."""


class AmbiguousFrequency(ComputationError):
    """Two spectral bins compete for the dominant oscillation frequency."""


class ZeroMedian(ComputationError):
    """RCV is undefined because the trace median is zero."""


class PipelineStageError(ComputationError):
    """Wraps the first error raised inside a pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
