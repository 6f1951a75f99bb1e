"""Exception hierarchy shared by every module."""


class KisinError(Exception):
    pass


class ZeroInverse(KisinError, ZeroDivisionError):
    pass


class SpecMismatch(KisinError, ValueError):
    pass


class InsufficientPrecision(KisinError):
    pass


class ZeroValuation(KisinError, ValueError):
    pass


class SingularMatrix(KisinError, ValueError):
    pass


class OutOfRange(KisinError, ValueError):
    pass


class FixedPointInconsistent(KisinError):
    pass


class AmbiguousQ(KisinError):
    pass


class InternalDisagreement(KisinError, AssertionError):
    """Two independent formulations of the same predicate disagreed."""


class EmptyDetClass(KisinError):
    pass


class DetMismatch(KisinError, ValueError):
    pass


class NoWitness(KisinError):
    pass


class PreconditionViolated(KisinError, ValueError):
    pass


class MembershipLost(KisinError, AssertionError):
    pass


class ConstraintEmpty(KisinError):
    pass


class ConfigError(KisinError, ValueError):
    pass
