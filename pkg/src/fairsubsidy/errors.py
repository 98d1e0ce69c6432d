"""Exception types shared across the library."""


class FairSubsidyError(Exception):
    """Base class for all library errors."""


class InstanceError(FairSubsidyError):
    """Raised when an instance description fails validation.

    Carries the full list of violations so callers can report all of
    them at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class WeightSumError(FairSubsidyError):
    pass


class NonPositiveWeight(FairSubsidyError):
    pass


class NonMonotoneValuation(FairSubsidyError):
    def __init__(self, message, smaller=None, larger=None):
        super().__init__(message)
        self.smaller = smaller
        self.larger = larger


class UnboundedValuation(FairSubsidyError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CheckTooLarge(FairSubsidyError):
    pass


class TooLarge(FairSubsidyError):
    pass


class WrongValuationKind(FairSubsidyError):
    pass


class WrongAgentCount(FairSubsidyError):
    pass


class DegenerateInstance(FairSubsidyError):
    pass


class NotEnvyFreeable(FairSubsidyError):
    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle


class NotSupermodular(FairSubsidyError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NegativeBudget(FairSubsidyError):
    pass


class UpfrontTooSmall(FairSubsidyError):
    pass


class InternalInconsistency(FairSubsidyError):
    """Two supposedly equivalent criteria disagreed: implementation bug."""


class InternalPathError(FairSubsidyError):
    """An augmenting path promised by the invariants was not found."""


class FixtureMismatch(FairSubsidyError):
    def __init__(self, message, expected=None, actual=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual
