"""Shared exception types; the CLI maps them onto exit codes."""


class QeflatError(Exception):
    """Base class for all package-specific failures."""


class PreconditionError(QeflatError):
    """An operation's stated precondition does not hold (exit code 3).

    Examples: critical point of the potential, non-adapted chart handed to
    an adapted-chart check, sample points on different level sets.
    """


class InputError(QeflatError):
    """Malformed user input: metric files, CLI arguments (exit code 2)."""


class SingularMetricError(QeflatError):
    """Metric not invertible or not positive definite at the point."""


class InsufficientJetOrderError(QeflatError):
    """A derivative was requested beyond the exact grade of a jet field."""
