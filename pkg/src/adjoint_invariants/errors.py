"""Exception hierarchy shared by every module of the package."""


class AdjointInvariantsError(Exception):
    """Base class; the CLI maps these to exit code 2."""


class InvalidRank(AdjointInvariantsError, ValueError):
    pass


class NotProportional(AdjointInvariantsError):
    pass


class DegreeMismatch(AdjointInvariantsError, ValueError):
    pass


class DimMismatch(AdjointInvariantsError, ValueError):
    pass


class BadPrime(AdjointInvariantsError, ArithmeticError):
    """A denominator vanishes modulo the requested prime (or it is not prime)."""


class PrimeDisagreement(AdjointInvariantsError):
    pass


class BudgetExceeded(AdjointInvariantsError):
    def __init__(self, what, entries, budget):
        super().__init__(f"{what}: {entries} entries exceeds budget {budget}")
        self.entries = entries
        self.budget = budget


class WrongFamily(AdjointInvariantsError, ValueError):
    pass
