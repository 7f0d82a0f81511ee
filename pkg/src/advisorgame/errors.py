"""Exception types shared across the package."""


class AdvisorGameError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(AdvisorGameError, ValueError):
    """A model parameter is outside its admissible domain."""


class BracketingError(AdvisorGameError, RuntimeError):
    """The oracle could not bracket the minimizer of the raw objective."""


class NumericalError(AdvisorGameError, ArithmeticError):
    """An objective evaluation produced a non-finite value."""


class SweepSpecError(AdvisorGameError, ValueError):
    """A sweep request is inconsistent or out of domain."""


class SweepCheckError(AdvisorGameError, RuntimeError):
    """A computed sweep violates the shape property it must satisfy."""


class ConfigError(AdvisorGameError, ValueError):
    """A configuration document is malformed or ambiguous."""
