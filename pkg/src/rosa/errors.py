"""Exception types. Each carries the exit code used by the command line."""


class RosaError(Exception):
    exit_code = 1


class ValidationError(RosaError, ValueError):
    """Bad input: even n, malformed edgeword or patch, inconsistent geometry."""

    exit_code = 2


class BudgetExceeded(RosaError):
    """A search or iteration ran past its node/tile budget."""

    exit_code = 3


class NotFound(RosaError):
    """A search finished without finding what was asked for."""

    exit_code = 4
