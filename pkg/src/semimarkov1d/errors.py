"""Exception and warning types shared across the package."""


class SemiMarkovError(Exception):
    """Base class for every error this package raises deliberately."""


class ParamError(SemiMarkovError):
    """A density parameter is outside its admissible range."""


class NormalizationError(SemiMarkovError):
    """Probability weights do not form a distribution."""


class TopologyError(SemiMarkovError):
    """A transition targets a state the one-dimensional chain does not allow."""


class ModelError(SemiMarkovError):
    """The chain lacks the structure an operation requires."""


class DomainError(SemiMarkovError):
    """A Laplace point lies outside the operation's half-plane of validity."""


class OrderError(SemiMarkovError):
    """A coefficient order is out of range for the chain length."""


class SingularError(SemiMarkovError):
    """Evaluation hit a pole or an effectively singular linear system."""


class FallbackRequired(SemiMarkovError):
    """The closed-form path evaluation is ill-conditioned at this point.

    Raised instead of returning garbage when coefficient ratios blow up;
    callers should use the recursion, which has no such ratios.
    """


class NonConvergence(SemiMarkovError):
    """A truncated series failed to settle within its term budget."""

    def __init__(self, message: str, last_ratio: float | None = None,
                 terms: int | None = None):
        super().__init__(message)
        self.last_ratio = last_ratio
        self.terms = terms


class BudgetError(SemiMarkovError):
    """An exhaustive enumeration would exceed its cost guard."""


class MethodError(SemiMarkovError):
    """An inversion request is malformed (bad time point or method setup)."""


class ParseError(SemiMarkovError):
    """A configuration document is not valid JSON."""


class SchemaError(SemiMarkovError):
    """A configuration document does not match the expected schema."""


class EmptyInput(SemiMarkovError):
    """An estimator received no data."""


class AccuracyWarning(UserWarning):
    """Two independent numerical methods disagreed beyond tolerance."""


class InsufficientSamples(UserWarning):
    """Too few qualifying events for a trustworthy estimate."""
