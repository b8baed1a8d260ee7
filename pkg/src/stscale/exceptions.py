"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class StscaleError(Exception):
    exit_code = 1

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class ValidationError(StscaleError, ValueError):
    exit_code = 2


class VideoIOError(StscaleError, OSError):
    exit_code = 3


class FileSizeMismatchError(VideoIOError):
    def __init__(self, path, expected_multiple, actual):
        self.path = str(path)
        self.expected_multiple = expected_multiple
        self.actual = actual
        super().__init__(
            f"{self.path}: size {actual} bytes is not a multiple of the "
            f"frame size {expected_multiple} bytes (remainder {actual % expected_multiple})"
        )


class NumericalError(StscaleError, ArithmeticError):
    exit_code = 4


class NoInterSlicesError(NumericalError):
    """Raised when bits are allocated at a rate where ``p_inter`` is zero."""
