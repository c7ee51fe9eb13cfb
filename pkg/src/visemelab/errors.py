"""Exception hierarchy shared across the package.

Everything raised on purpose derives from VisemeLabError so the CLI can map
failures onto its exit-code contract (data errors exit 2, numeric failures
exit 3).
"""


class VisemeLabError(Exception):
    """Base class for all errors raised by visemelab."""


class ParseError(VisemeLabError):
    """A bundled or user-supplied data file failed to parse."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class ConflictError(VisemeLabError):
    """Two records contradict each other (e.g. one phoneme, two visemes)."""


class UnknownVisemeError(VisemeLabError):
    """A viseme symbol appears in neither language's mapping table."""


class MissingEntryError(VisemeLabError):
    """A word has no lexicon entry. Never silently skipped."""


class UnmappedPhonemeError(VisemeLabError):
    """A phoneme has no viseme mapping for the requested language."""


class EmptyInputError(VisemeLabError):
    """An operation that needs data received none."""


class ConfigurationError(VisemeLabError):
    """Inconsistent run configuration (bad parameter, missing viseme, ...)."""


class InsufficientDataError(VisemeLabError):
    """A trace or report is too short for the requested analysis."""


class IncompatibleTracesError(VisemeLabError):
    """Traces built against different viseme inventories were combined."""


class NumericFailureError(VisemeLabError):
    """Training produced a non-finite loss or parameter. Always aborts."""


class NoCriticalPeriodError(VisemeLabError):
    """Phase 1 of a sequential run ended without the detector firing.

    Carries the partial trace recorded so far in ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
