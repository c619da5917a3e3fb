"""Small argument checks shared by the estimators and config objects."""

import math
import numbers


class ConfigError(ValueError):
    """Invalid hyperparameter or configuration value."""


def check_scalar(value, name, *, min_val=None, max_val=None,
                 include_min=True, include_max=True, integer=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if integer and not float(value).is_integer():
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    if min_val is not None:
        if value < min_val or (not include_min and value == min_val):
            op = ">=" if include_min else ">"
            raise ConfigError(f"{name} must be {op} {min_val}, got {value!r}")
    if max_val is not None:
        if value > max_val or (not include_max and value == max_val):
            op = "<=" if include_max else "<"
            raise ConfigError(f"{name} must be {op} {max_val}, got {value!r}")
    return int(value) if integer else value


def check_positive(value, name):
    return check_scalar(value, name, min_val=0, include_min=False)


def check_probability(value, name):
    return check_scalar(value, name, min_val=0.0, max_val=1.0)
