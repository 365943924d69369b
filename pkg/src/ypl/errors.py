"""Exception types shared across the package."""

import numpy as np


class YPLError(Exception):
    """Base class for package errors."""


class DomainError(YPLError, ValueError):
    """An elementary function was evaluated outside its domain.

    ``mask`` flags the offending entries of the evaluation batch when the
    failure happened on a vectorized evaluation.
    """

    def __init__(self, message, mask=None):
        super().__init__(message)
        self.mask = None if mask is None else np.asarray(mask, dtype=bool)


class SamplingExhausted(YPLError, RuntimeError):
    pass


class SingularProfile(YPLError, ValueError):
    pass


class InvalidParams(YPLError, ValueError):
    pass


class DegenerateFrame(YPLError, ValueError):
    pass


class StepLimitExceeded(YPLError, RuntimeError):
    pass


class MissingGenerator(YPLError, KeyError):
    pass


class NoPeriodDetected(YPLError, RuntimeError):
    pass


class ConfigError(YPLError, ValueError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason
