"""Exception hierarchy shared by every module."""


class FormRingError(Exception):
    """Base class for all library errors."""


class RingSpecError(FormRingError, ValueError):
    """Malformed ring description, bad involution or bad lambda."""


class NilpotentElement(FormRingError):
    pass


class NotACover(FormRingError):
    pass


class GeneratorOutsideLambdaMax(FormRingError):
    pass


class CapExceeded(FormRingError):
    """Raised when an enumeration hits its element cap.

    ``partial`` holds whatever was built before the cap was reached.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TooLarge(FormRingError):
    pass


class NotInvertible(FormRingError):
    pass


class BadIndex(FormRingError, IndexError):
    pass


class DiagonalParameterNotInLambda(FormRingError):
    pass


class PreconditionViolated(FormRingError):
    def __init__(self, clause, message=None):
        super().__init__(message or clause)
        self.clause = clause


class DimensionMismatch(FormRingError, ValueError):
    pass


class NotCongruentAtZero(FormRingError):
    pass


class NotNormalizedAtZero(FormRingError):
    pass


class UnresolvedRelation(FormRingError):
    pass


class VerificationFailed(FormRingError):
    pass


class DegreeOverflow(FormRingError):
    pass
