"""Exception hierarchy shared across the engine."""


class FaultrankError(Exception):
    """Base class for all engine errors."""


class IngestError(FaultrankError):
    """A wire-format file could not be parsed.

    Carries the offending path and, for line-delimited files, the
    1-based line number of the bad record.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)


class UnknownEntityError(FaultrankError):
    """An operation referenced a location absent from the program model."""


class InconsistentCountsError(FaultrankError):
    """Coverage or kill counts disagree with the test totals."""


class GranularityMismatchError(FaultrankError):
    """Lists of different granularities were mixed in one operation."""


class EmptyGroundTruthError(FaultrankError):
    """An edit script derived no faulty location (such bugs are discarded)."""


class TechniqueUnavailableError(FaultrankError):
    """The evidence required by a technique was not collected for this bug.

    Distinct from an empty result: a technique that ran and found
    nothing returns an empty list instead.
    """


class DegenerateStatisticError(FaultrankError):
    """The statistic is undefined for this input (zero variance, all-zero diffs)."""
