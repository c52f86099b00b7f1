"""Exception hierarchy shared by the solver, oracle and CLI."""


class GsrwaError(Exception):
    """Base class for all package errors."""


class SqueezingOverflowError(GsrwaError, ValueError):
    """Squeezing parameter outside the supported ``|lambda| <= LAMBDA_CAP`` range."""


class NumericalError(GsrwaError, RuntimeError):
    """A numerical routine failed to converge or produced an invalid result."""


class NoCrossingError(NumericalError):
    """The requested coupling interval does not bracket a level crossing."""


class TruncationError(NumericalError):
    """Fock-space truncation did not converge below the cutoff ceiling."""


class ConfigError(GsrwaError, ValueError):
    """Invalid sweep configuration."""
