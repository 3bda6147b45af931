"""Exception types shared across the package."""


class GkpSimError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(GkpSimError, ValueError):
    """Raised for malformed numerical inputs (non-finite, wrong shape, ...)."""


class InvalidParameterError(GkpSimError, ValueError):
    """Raised for unsupported parameter combinations (family, distance, ...)."""


class LatticeMembershipError(GkpSimError, ValueError):
    """Raised when a vector is not a member of the expected lattice."""


class FeasibilityError(GkpSimError, ValueError):
    """Raised when an exhaustive computation would exceed its size guard."""


class NumericalFailureError(GkpSimError, RuntimeError):
    """Raised when a numerical routine produces non-finite or degenerate output."""


class InvalidStateError(GkpSimError, ValueError):
    """Raised when a Gaussian state violates the uncertainty relation."""


class MissingDataError(GkpSimError, ValueError):
    """Raised when an analysis routine lacks the data points it needs."""


class NoCrossingError(GkpSimError, ValueError):
    """Raised when two fidelity curves do not cross on the sampled grid."""
