"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`RelentError`,
so callers (and the CLI) can map failures to exit codes without catching
unrelated bugs.
"""


class RelentError(Exception):
    """Base class for package errors."""


class DomainError(RelentError, ValueError):
    """An argument lies outside the domain of an operation."""


class FormatError(RelentError, ValueError):
    """An input file or string could not be parsed."""


class InfeasibleError(DomainError):
    """A constraint set has no feasible distribution, or the input is degenerate."""


class ConvergenceError(RelentError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations
