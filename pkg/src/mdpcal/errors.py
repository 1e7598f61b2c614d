"""Exception types shared across the calibration toolkit."""


class DomainError(ValueError):
    """An input falls outside the mathematical domain of an operation."""


class BracketError(DomainError):
    """A numeric minimiser found its optimum on the boundary of the search bracket."""


class DegenerateSampleError(DomainError):
    """A sample has no dispersion where a scale estimate is required."""
