"""Exception hierarchy shared by all modules."""


class TransTorsionError(Exception):
    """Base class for all errors raised by the package."""


class NonFinite(TransTorsionError, ValueError):
    """A matrix or vector contains NaN or infinite entries."""


class NonSymplectic(TransTorsionError, ValueError):
    """A homoclinic matrix failed the symplecticity check at construction."""


class ConditioningExceeded(TransTorsionError):
    """lambda**-n is too large for the requested precision mode."""

    def __init__(self, message, required_mode=None):
        super().__init__(message)
        self.required_mode = required_mode


class NotPalindromic(TransTorsionError):
    """Characteristic polynomial of a supposedly symplectic matrix is not palindromic."""


class OracleMismatch(TransTorsionError):
    """Two independent computations of the same quantity disagree beyond tolerance."""


class FactorizationMismatch(OracleMismatch):
    """The special-case factorization disagrees with the trace oracle."""


class NotStronglyTransverse(TransTorsionError, ValueError):
    pass


class NotWithTorsion(TransTorsionError, ValueError):
    pass


class NotYetHyperbolic(TransTorsionError):
    """A requested return time does not give a real hyperbolic spectrum."""


class NotInDomain(TransTorsionError):
    """A point has no return time n <= n_max into the exit neighbourhood."""
