"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its allowed domain."""


class ContractViolationError(RuntimeError):
    """An operation was called in a configuration it does not support."""


class UndefinedNormalizationError(ValueError):
    """A statistic cannot be normalized (e.g. zero variance input)."""


class ConfigError(ValueError):
    """A scenario file could not be parsed or holds invalid values."""
