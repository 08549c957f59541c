class DegenerateChannelError(ArithmeticError):
    """A rate or error estimate is 0/0: no signal and no background reaches the detectors."""


class ConfigError(ValueError):
    """Bad configuration file or value. ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class DeadAtZeroDistance(ValueError):
    """The protocol's key rate is already below the floor at L = 0."""
