"""Exception hierarchy shared by every module of the package."""


class RotsetsError(Exception):
    """Base class for all package errors."""


class BudgetError(RotsetsError):
    """A configured resource cap was hit. The CLI maps these to exit code 3."""


class NotPrimitive(RotsetsError):
    pass


class UniquelyErgodicRisk(RotsetsError):
    pass


class BudgetExceeded(BudgetError):
    pass


class RankOverflow(BudgetError):
    pass


class LcmOverflow(BudgetError):
    pass


class IterationCap(BudgetError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NoPeriodicPointClose(BudgetError):
    pass


class WordTooShort(RotsetsError):
    pass


class DisallowedWord(RotsetsError):
    pass


class DimensionMismatch(RotsetsError):
    pass


class DimensionUnsupported(RotsetsError):
    pass


class ZeroDirection(RotsetsError):
    pass


class DegenerateBody(RotsetsError):
    pass


class PreconditionError(RotsetsError):
    """An operation was called outside its documented domain."""


class SingletonRotationSet(PreconditionError):
    pass


class TargetsNotContaining(PreconditionError):
    pass


class PerturbationTooLarge(PreconditionError):
    pass


class CertificateFailure(RotsetsError):
    """A postcondition that the construction guarantees did not hold."""
