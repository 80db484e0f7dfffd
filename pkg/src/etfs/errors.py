"""Exception hierarchy shared by every solver module."""


class SanitizeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SanitizeError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ReservedSymbolError(ParseError):
    """The gadget symbol '#' appeared inside W."""


class DomainError(SanitizeError):
    """A numeric parameter is outside its legal range (e.g. not 1 < k < n)."""


class IntervalError(SanitizeError):
    """A sensitive interval lies outside [0, n-1] or has i > j."""


class StrictModeError(SanitizeError):
    """Strict normalization found a closure or minimality violation."""

    def __init__(self, message, interval):
        self.interval = interval
        super().__init__(f"{message}: {list(interval)}")


class LongPatternError(SanitizeError):
    """An ETFS-only solver was handed a sensitive pattern longer than k."""


class IllegalSymbolError(SanitizeError):
    """A candidate string uses a symbol outside the alphabet and '#'."""


class StateBudgetError(SanitizeError):
    """The reference search exhausted its state budget."""
