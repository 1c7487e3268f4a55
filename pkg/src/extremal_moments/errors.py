"""Exception types shared across the toolkit."""


class NumericFailure(RuntimeError):
    """An iterative routine exhausted its iteration budget or lost its bracket."""


class MembershipError(ValueError):
    """The input does not belong to the class an operation requires."""


class DegenerateWeightError(ValueError):
    """A parameter point would carry a zero weight and falls outside the family."""
