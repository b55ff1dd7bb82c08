"""Exception types shared across the package."""


class RaqmError(Exception):
    """Base class for every error raised by raqm."""


class MixedRadicands(RaqmError, ValueError):
    pass


class NegativeInput(RaqmError, ValueError):
    pass


class SquareFreeBoundExceeded(RaqmError, ValueError):
    """Radicand has a cofactor that trial division cannot resolve."""


class OutOfRange(RaqmError, ValueError):
    pass


class LengthMismatch(RaqmError, ValueError):
    pass


class BadL(RaqmError, ValueError):
    pass


class DomainError(RaqmError, ValueError):
    pass


class GridIncompatible(RaqmError, ValueError):
    """The requested exact setting has no representation at this L."""


class NoCompatibleSetting(RaqmError, RuntimeError):
    """No grid-compatible cosine lies inside the nominal tolerance window."""

    def __init__(self, message, run_id=None):
        super().__init__(message)
        self.run_id = run_id


class BaseMismatch(RaqmError, ValueError):
    pass
