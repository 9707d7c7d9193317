"""Exception types raised across the package."""


class InvalidInput(ValueError):
    """A market, matching, or contract reference is malformed."""


class ParameterError(ValueError):
    """A constructor or bound was called outside its domain."""


class DuplicateOffer(RuntimeError):
    """A contract was offered twice to the same sequential choice state."""


class SearchLimitExceeded(ValueError):
    """An exact search was asked to handle more candidates than allowed."""


class InvariantViolation(AssertionError):
    """Internal bug: a choice state broke an axiom the engine relies on."""
