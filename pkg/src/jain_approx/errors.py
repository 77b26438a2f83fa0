"""Exception hierarchy shared by every module."""


class JainError(Exception):
    """Base class for all errors raised by this package."""


class NumericError(JainError):
    """A numerical procedure failed to reach its target accuracy."""


class TruncationNotConverged(NumericError):
    def __init__(self, alpha, beta, k_max):
        self.alpha, self.beta, self.k_max = alpha, beta, k_max
        super().__init__(
            f"series for alpha={alpha!r}, beta={beta!r} did not meet the "
            f"stopping rule before k_max={k_max}"
        )


class QuadratureNotConverged(NumericError):
    pass


class NonFiniteFunctionValue(NumericError):
    pass


class DomainError(NumericError):
    """An expression was evaluated outside its domain (log(0), 1/0, ...)."""


class IllConditionedFit(NumericError):
    pass


class UnsupportedOrder(JainError, ValueError):
    pass


class DegenerateXi(JainError, ValueError):
    pass


class EmptyDataset(JainError, ValueError):
    pass


class IndexOutOfRange(JainError, IndexError):
    pass


class UnknownFunction(JainError, KeyError):
    pass


class UnknownIdentifier(JainError):
    def __init__(self, name, offset):
        self.name, self.offset = name, offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class ExpressionSyntaxError(JainError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class BatchEvaluationError(JainError):
    """Collects per-cell failures of a batch run, keyed by (n, x)."""

    def __init__(self, failures):
        self.failures = failures
        head = ", ".join(f"(n={n}, x={x}): {type(e).__name__}" for n, x, e in failures[:5])
        more = "" if len(failures) <= 5 else f" and {len(failures) - 5} more"
        super().__init__(f"{len(failures)} cell(s) failed: {head}{more}")
