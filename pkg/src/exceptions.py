"""
Exception hierarchy for the capra package.

All errors derive from ValueError so callers that only know the builtin
keep working.
"""


class CapraError(ValueError):
    """Base class for every error raised by this package."""


class NaNValueError(CapraError):
    """A NaN reached a constructor that forbids it."""


class DimensionMismatchError(CapraError):
    """Two objects live in spaces of different dimension."""


class OrderOutOfRangeError(CapraError):
    """A norm order k is outside its admissible range."""


class DimensionGuardError(CapraError):
    """An exhaustive oracle was asked for a dimension above its guard."""


class NotOnSphereError(CapraError):
    """Input vector is required to have unit Euclidean norm."""


class SampleSetError(CapraError):
    """Sample set is empty, malformed or has duplicate points."""


class BiconjugateCeilingError(CapraError):
    """A computed biconjugate exceeded the function it came from."""


class DualBoundViolationError(CapraError):
    """Weak duality lower bound exceeded the primal upper bound."""


class ConfigError(CapraError):
    """Invalid configuration file, environment value or flag."""


class VectorFileError(CapraError):
    """A vector or sample file could not be read or parsed."""
