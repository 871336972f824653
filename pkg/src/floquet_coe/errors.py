"""Exception types raised across the package."""


class FloquetCOEError(Exception):
    """Base class for all package errors."""


class SizeLimitError(FloquetCOEError, ValueError):
    """A requested object exceeds a memory or enumeration guard."""


class IntegratorError(FloquetCOEError, RuntimeError):
    """The time integrator failed to converge."""


class NumericalError(FloquetCOEError, RuntimeError):
    """A dense linear-algebra routine failed or produced an invalid result."""


class SymmetryError(FloquetCOEError, ValueError):
    """A matrix expected to be symmetric (or commuting) is not."""


class MappingError(FloquetCOEError, ValueError):
    """A circuit cannot be mapped onto a consistent Ising graph."""


class ConfigError(FloquetCOEError, ValueError):
    """An experiment configuration is malformed or out of range."""
