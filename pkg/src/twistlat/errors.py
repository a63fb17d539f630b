"""Exception hierarchy shared by every module of the package."""


class TwistlatError(Exception):
    """Base class for all errors raised by twistlat."""


class EtaInconsistent(TwistlatError):
    pass


class NotInvertible(TwistlatError):
    pass


class DecompositionResidual(TwistlatError):
    pass


class ZeroEigenvalue(TwistlatError):
    pass


class UnknownBlock(TwistlatError):
    pass


class SingularRestriction(TwistlatError):
    pass


class InsufficientDerivatives(TwistlatError):
    pass


class AtPole(TwistlatError):
    pass


class OutOfDomain(TwistlatError):
    pass


class NotLatticeVector(TwistlatError):
    pass


class RepInconsistent(TwistlatError):
    pass


class BasisTooLarge(TwistlatError):
    pass


class TruncationExceeded(TwistlatError):
    pass


class NoUDescriptor(TwistlatError):
    pass


class ThetaWindowOverflow(TwistlatError):
    pass


class UnsupportedBlockStructure(TwistlatError):
    pass


class BadInput(TwistlatError):
    """Malformed input document; the message names the offending field."""
