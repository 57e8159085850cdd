"""Exception hierarchy shared by the library and the CLI."""


class NFRError(Exception):
    """Base class for every error raised by divnfr."""


class ConfigError(NFRError, ValueError):
    """Inconsistent or out-of-range configuration."""


class ParseError(NFRError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ShapeError(NFRError, ValueError):
    pass


class DomainError(NFRError, ValueError):
    pass


class NumericalError(NFRError, ArithmeticError):
    """A linear solve or factorization failed where the model says it cannot."""


class SolverStatusError(NFRError):
    """The LP solver stopped without an optimal solution."""

    def __init__(self, status, report=None, label=""):
        self.status = status
        self.report = report
        super().__init__(f"{label or 'linear program'}: solver status {status}")
