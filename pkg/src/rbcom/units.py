"""Validated scalar types and decibel conversions.

Everything inside the package is SI (W, m, rad, W/m^2). The wrappers below
subclass ``float`` so they drop straight into numpy expressions; they only
guarantee that the value was finite and non-negative when it was built.
"""

import math


class _NonNegative(float):
    unit = ""

    def __new__(cls, value):
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"{cls.__name__} must be finite, got {value!r}")
        if v < 0.0:
            raise ValueError(f"{cls.__name__} must be non-negative, got {value!r}")
        return super().__new__(cls, v)

    def __repr__(self):
        return f"{type(self).__name__}({float(self)!r})"


class PowerW(_NonNegative):
    """Optical or electrical power in watts."""

    unit = "W"


class Amplitude(_NonNegative):
    """Square-root-of-watts signal amplitude (amplitude**2 is power)."""

    unit = "sqrt(W)"


class IntensityWm2(_NonNegative):
    """Optical intensity in W/m^2."""

    unit = "W/m^2"


class Ratio(_NonNegative):
    """Dimensionless fraction in [0, 1]."""

    unit = "1"

    def __new__(cls, value):
        self = super().__new__(cls, value)
        if self > 1.0:
            raise ValueError(f"Ratio must not exceed 1, got {value!r}")
        return self


def dbm_to_watts(p_dbm):
    """Convert decibel-milliwatts to a :class:`PowerW`."""
    p = float(p_dbm)
    if not math.isfinite(p):
        raise ValueError(f"power in dBm must be finite, got {p_dbm!r}")
    return PowerW(10.0 ** ((p - 30.0) / 10.0))


def watts_to_dbm(p_watts):
    """Convert watts to dBm. Zero power has no dBm representation."""
    p = float(p_watts)
    if not (p > 0.0 and math.isfinite(p)):
        raise ValueError(f"power must be positive and finite to express in dBm, got {p_watts!r}")
    return 10.0 * math.log10(p) + 30.0
