"""Exception and warning types shared across the package."""


class TruncationError(RuntimeError):
    """A certified series truncation could not reach the requested tolerance.

    Carries the partial sum and the error bound that was achieved so callers
    can decide whether the partial result is still usable.
    """

    def __init__(self, message: str, partial: float, err_bound: float):
        super().__init__(message)
        self.partial = partial
        self.err_bound = err_bound


class QuadratureError(RuntimeError):
    """Adaptive quadrature ran out of subdivisions before converging."""

    def __init__(self, message: str, partial: float, err_bound: float):
        super().__init__(message)
        self.partial = partial
        self.err_bound = err_bound


class EstimatorUndefinedError(ValueError):
    """An estimator was queried at a sample where it is not defined.

    The scaled-total estimator r*d/(2*sum(x)) and the unbiased-risk-estimate
    minimizer both need sum(x) > 0.
    """


class DominanceWarning(UserWarning):
    """A moment-rule coefficient is outside the range with a risk guarantee.

    The shrink coefficient b must satisfy 0 < b <= d - 2 for the documented
    risk-dominance property; other positive values are legal inputs but carry
    no guarantee.
    """
