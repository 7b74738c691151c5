"""Exception and warning types shared across the toolkit."""


class PhonolibError(Exception):
    """Base class for all toolkit errors."""


class DomainError(PhonolibError, ValueError):
    """An argument lies outside the domain of a model or formula."""


class PreconditionError(PhonolibError, ValueError):
    """A modelling assumption (e.g. Debye cutoff far above the splitting) is violated."""


class UsageError(PhonolibError, ValueError):
    """Malformed request: empty grids, bad ranges, wrong argument combinations."""


class StructuralError(PhonolibError, ValueError):
    """A level system or generator matrix is not a valid rate model."""


class QuadratureError(PhonolibError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, *, estimate=None, error=None, panels=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.panels = panels


class FitError(PhonolibError, ArithmeticError):
    """Least-squares fit failed (singular normal matrix, non-convergence)."""

    def __init__(self, message, *, correlation=None, names=None):
        super().__init__(message)
        self.correlation = correlation
        self.names = names


class DatasetError(PhonolibError, ValueError):
    """A data file could not be parsed or has the wrong units."""


class ConfigError(PhonolibError, ValueError):
    """Invalid configuration document."""


class ValidityWarning(UserWarning):
    """An approximation is being used outside its stated window of validity."""
