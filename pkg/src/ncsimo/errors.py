"""Exception types raised across the package."""


class NotAConstellationPoint(ValueError):
    """A complex value does not lie on the sum-constellation grid."""


class UnsupportedSize(ValueError):
    """Problem size exceeds what an exhaustive routine will enumerate."""


class OutOfModelRange(ValueError):
    """Input outside the validity range of a propagation model."""


class InternalConsistencyError(RuntimeError):
    """A quantity that the design guarantees positive was not."""


class DetectionFailure(RuntimeError):
    """A receiver could not produce a decision for a block."""


class ConfigError(ValueError):
    """Invalid simulation configuration; message names the offending key."""


class ProfileParseError(ValueError):
    """Malformed user profile file; carries the 1-based line number."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
