"""Exception hierarchy shared across the package."""


class DistillcertError(Exception):
    """Base class for all package errors."""


class InvariantViolation(DistillcertError):
    """A domain-type invariant failed; the first argument names it."""


class DimensionMismatch(DistillcertError):
    """Operator/state dimensions are incompatible."""


class NullOutcome(DistillcertError):
    """A local filter branch has (numerically) zero outcome probability."""


class BadDims(DistillcertError):
    """Vector length and declared tensor dimensions disagree, or dims unsupported."""


class UnsupportedDims(DistillcertError):
    """The requested criterion is undefined for these dimensions."""


class BadParams(DistillcertError):
    """Generator parameters violate their constraints."""


class BadRank(DistillcertError):
    """Requested rank outside the valid range."""


class DegenerateParams(DistillcertError):
    """Generator parameters produce a degenerate (linearly dependent) family."""


class AllRootsRankOne(DistillcertError):
    """Every determinant-zero combination is a product vector; use the
    product-in-range branch instead."""


class ProductInRange(DistillcertError):
    """Canonicalization found a product vector in the range; the caller
    must branch to the product-projection path."""


class PreconditionViolated(DistillcertError):
    """An operation's stated precondition does not hold for the input."""


class RankDeficientReduced(DistillcertError):
    """The reduced state on the filtered side is rank deficient; restrict
    to its support first."""


class SynthesisFailed(DistillcertError):
    """No branch produced a verifiable terminal within the search budgets."""


class NoParameterFound(DistillcertError):
    """The deterministic projector-parameter grid was exhausted.

    Carries the scanned grid and the state data as attributes for offline
    analysis.
    """

    def __init__(self, message, grid=None, state_matrix=None):
        super().__init__(message)
        self.grid = grid
        self.state_matrix = state_matrix


class NotFound(DistillcertError):
    """A bounded search ended without a qualifying result."""


class DomainError(DistillcertError):
    """Scalar argument outside the mathematical domain of the map."""


class ParseError(DistillcertError):
    """A file could not be parsed into the expected schema."""
