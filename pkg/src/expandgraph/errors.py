"""Exception types raised across the package."""


class IllConditionedError(ValueError):
    """A linear system is singular or numerically rank deficient."""


class DivergenceError(RuntimeError):
    """Raised when the training cost stops being finite."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"cost became non-finite at iteration {iteration}")


class ParseError(ValueError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class DuplicateRatingError(ValueError):
    pass
