"""Exception types shared across the package."""


class ConfigError(ValueError):
    """An experiment, code or codebook configuration that cannot be built."""
