"""Exception types shared across the package."""


class ZratioError(Exception):
    """Base class for all package-specific errors."""


class InputFormatError(ZratioError):
    """A histogram or graph file failed to parse.

    Carries the offending line number when one is known, so the CLI can
    point at it.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedParameterizationError(ZratioError):
    """Model parameters outside the supported reduction (Ising lambda != 1,
    hard-core lambda > 1)."""


class EnumerationBudgetError(ZratioError):
    """Brute-force enumeration was requested on a graph too large for 2^n."""


class EmptyGroundStateError(ZratioError):
    """beta = +inf was evaluated on a histogram with no ground states (c_0 = 0)."""


class StreamKeyConflictError(ZratioError):
    """Two oracle requests in one round share overlapping random-stream keys,
    which would silently correlate their samples."""


class SamplingBudgetError(ZratioError):
    """Rejection sampling for the beta = +inf endpoint exhausted its attempt
    budget."""
