"""Exception hierarchy shared by all modules."""


class ReconError(Exception):
    """Base class for every error raised by this package."""


class InvalidVertex(ReconError, IndexError):
    pass


class InvalidThreshold(ReconError, ValueError):
    pass


class NotAnEdge(ReconError, KeyError):
    pass


class InvalidPair(ReconError, ValueError):
    pass


class InvalidSet(ReconError, ValueError):
    pass


class BudgetExhausted(ReconError):
    """Raised when a query would push the current attempt past its budget.

    The oracle does not answer or charge the offending call. Callers that
    run under a budget catch this and restart with fresh randomness.
    """

    def __init__(self, budget: int, attempt_total: int, requested: int):
        self.budget = budget
        self.attempt_total = attempt_total
        self.requested = requested
        super().__init__(
            f"budget {budget} exhausted: {attempt_total} used, {requested} more requested"
        )


class GaveUp(ReconError):
    """Retry wrapper hit its attempt cap."""


class Infeasible(ReconError, ValueError):
    """Requested instance parameters cannot be realised."""


class Unsupported(ReconError, ValueError):
    """Input outside an algorithm's supported class (e.g. disconnected for NT-R)."""
