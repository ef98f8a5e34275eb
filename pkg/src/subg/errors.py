"""Exception hierarchy shared by every module of :mod:`subg`."""


class SubgError(Exception):
    """Base class for library errors."""


class DomainError(SubgError, ValueError):
    """A value lies outside the domain a certificate or operation admits."""


class NonFiniteError(DomainError):
    """NaN or infinite input where a finite number is required."""


class MissingLambda(SubgError, ValueError):
    pass


class UnexpectedLambda(SubgError, ValueError):
    pass


class NoSuchEdge(SubgError, LookupError):
    """The conversion table has no entry for the requested (source, target, regime)."""


class MeanNotZero(DomainError):
    pass


class EmptyInputError(SubgError, ValueError):
    pass


class ParamRegimeMismatch(SubgError, ValueError):
    pass


class Diverges(SubgError, ArithmeticError):
    """The expectation being evaluated is infinite."""


class NegativeInput(DomainError):
    pass
