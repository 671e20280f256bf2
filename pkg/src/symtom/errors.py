"""Exception types shared across the package."""


class TomographyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(TomographyError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateRayError(InvalidInputError):
    """The ray (mu, nu) = (0, 0) was requested; the tomogram is a delta there."""


class TruncationError(TomographyError):
    """A Fock-space truncation is too small for the requested evaluation."""


class QuadratureError(TomographyError):
    """A numerical integral failed to converge to the requested accuracy."""


class InvalidMatrixError(TomographyError):
    """A matrix violates the structural assumption of the operation (e.g. Hermiticity)."""


class NotPositiveDefiniteError(TomographyError):
    """A Gram matrix is decisively not positive semidefinite."""
