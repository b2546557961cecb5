"""Exception types shared across the package."""


class InputError(ValueError):
    """A caller violated a documented precondition."""


class NumericError(RuntimeError):
    """An iterative solver failed to converge or produced garbage."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
