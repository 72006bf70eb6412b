"""Exception hierarchy."""


class StoreshareError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(StoreshareError, ValueError):
    """One or more invariants of an input object are violated.

    ``problems`` lists every violated invariant, not just the first one.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ViabilityError(ValidationError):
    """A capital cost exceeds the arbitrage price, so storage never pays off."""


class EmptyDistribution(StoreshareError, ValueError):
    pass


class DegenerateDistribution(StoreshareError, ValueError):
    pass


class EmptyCoalition(StoreshareError, ValueError):
    pass


class EmptyConditioningEvent(StoreshareError, ValueError):
    """No sample day satisfies the conditioning event."""


class DegenerateVariance(StoreshareError, ValueError):
    pass


class DimensionMismatch(StoreshareError, ValueError):
    pass


class ZeroTotalExpectedCost(StoreshareError, ValueError):
    pass


class EmptyHistory(StoreshareError, ValueError):
    pass


class TooManyPlayers(StoreshareError, ValueError):
    pass


class NonPSDCorrelation(StoreshareError, ValueError):
    pass


class ParseError(StoreshareError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyAfterFilter(StoreshareError, ValueError):
    pass


class MissingSection(StoreshareError, KeyError):
    pass
