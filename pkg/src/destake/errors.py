"""Exception types raised across the package."""


class DestakeError(Exception):
    """Base class for all destake errors."""


class ParseError(DestakeError):
    """Snapshot input is malformed (bad schema, duplicate id, non-integer stake)."""


class ZeroStakeError(ParseError):
    """A validator record carries stake <= 0; the message names the offending id."""


class EmptySetError(DestakeError):
    """An operation received an empty validator/weight set."""


class NonPositiveWeightError(DestakeError):
    """A weight transform produced a weight <= 0 (e.g. log without offset on stake 1)."""


class InsufficientPointsError(DestakeError):
    """Rank-size fitting needs at least two points."""


class TooLargeError(DestakeError):
    """Exact Shapley enumeration was requested beyond the subset-enumeration limit."""


class InsufficientSamplesError(DestakeError):
    """Sampled Shapley estimation needs at least 1000 permutations."""


class ZeroVarianceError(DestakeError):
    """Pearson correlation is undefined because one of the vectors is constant."""


class InvalidSplitError(DestakeError):
    """A Sybil split request violates its preconditions."""


class OrderingViolationError(DestakeError):
    """A comparison report produced a negative improvement cell."""
