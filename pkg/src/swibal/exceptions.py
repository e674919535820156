"""Exception and warning types shared across the package."""


class SwibalError(Exception):
    """Base class for all errors raised by this package."""


class NotHurwitzError(SwibalError):
    """A matrix required to be Hurwitz has spectral abscissa >= 0."""

    def __init__(self, message, spectral_abscissa=None):
        super().__init__(message)
        self.spectral_abscissa = spectral_abscissa


class NearSingularError(SwibalError):
    """An eigenvalue pair lambda_i + lambda_j is within 1e-12 of zero,
    so the Lyapunov operator is numerically singular."""


class DivergedError(SwibalError):
    """The fixed-point series produced growing terms.

    Carries the partial report; the sufficient existence condition
    ||sum_j D_j D_j^T||_2 < 2*alpha/beta^2 for the generalized equation
    is likely violated.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DimensionTooLargeError(SwibalError):
    """Problem size exceeds the cap for the dense Kronecker solver."""


class SingularKroneckerMatrixError(SwibalError):
    """The assembled n^2 x n^2 Kronecker system is singular."""


class DegenerateGramiansError(SwibalError):
    """A Gramian factor has numerical rank zero; nothing to balance."""


class OrderTooLargeError(SwibalError):
    """Requested reduced order is outside the representable range."""


class BiorthogonalityViolatedError(SwibalError):
    """Projector pair fails W^T V = I beyond tolerance."""


class NotPositiveDefiniteError(SwibalError):
    """A certificate matrix required to be symmetric positive definite
    is not."""


class SimulationOverflowError(SwibalError):
    """State became nonfinite during integration."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class OrderCapWarning(UserWarning):
    """Requested reduced order exceeded the numerical rank and was capped."""


class TruncationTieWarning(UserWarning):
    """Singular values straddling the truncation index are numerically tied."""
