"""Exception types shared across the package."""


class WarpisoError(Exception):
    """Base class for all errors raised by warpiso."""


class DomainError(WarpisoError, ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(WarpisoError, ValueError):
    """A value lies outside the range of a monotone table."""


class EvaluationError(WarpisoError, ArithmeticError):
    """An integrand produced a non-finite value."""


class InvalidDensityError(WarpisoError, ValueError):
    pass


class InvalidGeneratorError(WarpisoError, ValueError):
    pass


class ConfigError(WarpisoError, ValueError):
    pass
