"""Exception types shared by all modules."""


class ValidationError(ValueError):
    """Input violates a stated precondition or invariant.

    ``violations`` maps a condition name to the measured residual.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = dict(violations or {})


class PreconditionError(ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResourceError(RuntimeError):
    pass


class ConsistencyError(RuntimeError):
    pass
