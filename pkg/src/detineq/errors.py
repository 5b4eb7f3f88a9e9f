"""Exception types shared across the package."""


class NotPositiveDefinite(ValueError):
    """Raised when a Cholesky pivot falls below the working-precision floor."""


class NoConvergence(RuntimeError):
    """Raised when the Jacobi eigensolver exhausts its sweep budget."""


class DimensionMismatch(ValueError):
    pass


class PreconditionFailed(ValueError):
    """The instance does not satisfy a hypothesis of the inequality.

    This marks an invalid input, not a violation of the inequality.
    """


class WoodburySkipped(ValueError):
    """The Woodbury identity was not checked because A - B D^-1 B^T is not SPD."""
