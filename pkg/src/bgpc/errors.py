"""Exception hierarchy shared by every module."""


class BGPCError(ValueError):
    """Base class for all errors raised by the package."""


class DimensionError(BGPCError):
    """Shapes are inconsistent or a matrix is empty."""


class RankError(BGPCError):
    """A matrix that must have full (column) rank does not."""


class ParameterError(BGPCError):
    """An argument is outside its documented domain."""


class DegenerateInputError(BGPCError):
    """Input violates a non-vanishing requirement (zero gain, zero ratio)."""


class PreconditionError(BGPCError):
    """A documented precondition of an algorithm does not hold."""


class EnumerationGuardError(BGPCError):
    """A combinatorial enumeration would exceed its configured size limit."""
