"""Exception hierarchy shared by every module of the package."""


class HyperLyapError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrixError(HyperLyapError, ValueError):
    """Empty, non-2-D or non-finite matrix input."""


class DimensionMismatchError(HyperLyapError, ValueError):
    pass


class NotHermitianError(HyperLyapError, ValueError):
    pass


class NotPositiveDefiniteError(HyperLyapError, ValueError):
    pass


class SingularMatrixError(HyperLyapError, ArithmeticError):
    """A pivot fell below the relative singularity threshold."""


class NoConvergenceError(HyperLyapError, ArithmeticError):
    pass


class InvalidEtaError(HyperLyapError, ValueError):
    """eta must be a real number strictly greater than one, or infinity."""


class InfiniteEtaError(HyperLyapError, ValueError):
    """The requested quantity is undefined at eta = infinity."""


class NotInRightHalfPlaneError(HyperLyapError, ValueError):
    pass


class OrderViolationError(HyperLyapError, ValueError):
    pass


class RadiusNotSubUnitError(HyperLyapError, ValueError):
    pass


class MinusOneInSpectrumError(SingularMatrixError):
    """I + A is singular, so the Cayley transform is undefined."""


class SingularIterateError(SingularMatrixError):
    """A sign iterate became singular: the spectrum touches the imaginary axis."""


class NotInSetError(HyperLyapError):
    """The matrix is outside the base inclusion, so no finite eta exists."""


class NotStableError(HyperLyapError):
    """The matrix is not positively stable; no Lyapunov certificate exists."""


class NotIsometryFamilyError(HyperLyapError, ValueError):
    pass


class SingularBaseError(HyperLyapError, ValueError):
    pass


class SamplerViolationError(HyperLyapError):
    """A difference-inclusion sampler produced a matrix outside its set."""
