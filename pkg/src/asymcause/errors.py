"""Exception hierarchy shared across the package."""


class AsymCauseError(Exception):
    """Base class for all errors raised by this package."""


class DataError(AsymCauseError):
    """Invalid input data: malformed files, missing values, bad series."""


class InsufficientDataError(AsymCauseError):
    """Sample too short for the requested model."""


class SingularityError(AsymCauseError):
    """Rank-deficient design or singular matrix; never silently regularized."""


class NotPositiveDefiniteError(AsymCauseError):
    """A matrix required to be positive definite is not."""


class LikelihoodError(AsymCauseError):
    """Log-likelihood evaluated to a non-finite value."""
