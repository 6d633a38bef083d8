"""Exception types shared across the package."""


class Su2EstError(Exception):
    """Base class for all library-specific errors."""


class DegenerateModel(Su2EstError):
    """The channel Fisher matrix is singular; the observable frame is undefined."""


class SizeLimit(Su2EstError):
    """Requested copy count exceeds the dense-matrix cap."""


class NotAState(Su2EstError):
    """Operator fails the density-matrix checks (PSD, unit trace)."""


class InvalidPOVM(Su2EstError):
    """POVM elements do not resolve the identity or are not PSD."""


class NotAchievable(Su2EstError):
    """Input state has a complex Z matrix; no SLD-attaining measurement exists."""


class RankDeficient(Su2EstError):
    """Gram matrix of the SLD vectors is singular beyond tolerance."""


class SingularFisher(Su2EstError):
    """Fisher matrix is not invertible; no locally unbiased estimator."""


class NotPositiveDefinite(Su2EstError):
    """Weight or Fisher matrix is not symmetric positive definite."""


class NoClosedForm(Su2EstError):
    """No closed-form optimal Fisher matrix is known for this regime."""


class NotSaturable(Su2EstError):
    """The matrix inequality is not sharp for this (d, n) combination."""


class ConditionViolated(Su2EstError):
    """Copy count too small for the requested optimal strategy."""
