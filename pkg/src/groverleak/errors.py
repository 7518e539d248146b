"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument is outside the domain an operation accepts."""


class ConfigError(ValueError):
    """A model or experiment configuration is invalid.

    ``field`` names the offending configuration entry.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DataError(ValueError):
    """Input data is malformed or contains non-finite values."""
