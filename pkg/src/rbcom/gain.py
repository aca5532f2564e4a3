"""Saturated power gain of a pumped rod (Rigrod steady state).

The gain G at input intensity I solves

    I = (2 eta P_in - I_s S_0 ln G) / (2 (G - 1) S_0)

which is strictly decreasing in G on (1, exp(g)) with
g = 2 eta P_in / (I_s S_0). The solver works on the excess d = G - 1 so
that strongly saturated inputs (G barely above 1) keep full relative
precision.
"""

from dataclasses import dataclass
import math

import numpy as np

from rbcom._roots import bisect_decreasing
from rbcom.errors import DomainError


@dataclass(frozen=True)
class GainMedium:
    saturation_intensity: float  # I_s, W/m^2
    pump_efficiency: float  # eta
    rod_radius: float  # r0, m

    def __post_init__(self):
        if not self.saturation_intensity > 0:
            raise ValueError(f"saturation intensity must be > 0, got {self.saturation_intensity}")
        if not 0 < self.pump_efficiency <= 1:
            raise ValueError(f"pump efficiency must lie in (0, 1], got {self.pump_efficiency}")
        if not self.rod_radius > 0:
            raise ValueError(f"rod radius must be > 0, got {self.rod_radius}")

    @property
    def cross_section(self):
        """Rod cross-sectional area S_0 = pi r0^2 (m^2)."""
        return math.pi * self.rod_radius**2

    @property
    def saturation_power(self):
        """I_s * S_0, the power scale of gain compression (W)."""
        return self.saturation_intensity * self.cross_section


def gain_exponent(m, p_in):
    """Small-signal round-trip exponent g = 2 eta P_in / (I_s S_0); G < exp(g)."""
    if p_in < 0:
        raise DomainError(f"pump power must be >= 0, got {p_in}")
    return 2.0 * m.pump_efficiency * p_in / m.saturation_power


def gain_equation_rhs(m, p_in, gain):
    """Right-hand side of the gain equation: the input intensity that yields ``gain``."""
    gain = np.asarray(gain, dtype=float)
    excess = gain - 1.0
    return (2.0 * m.pump_efficiency * p_in - m.saturation_power * np.log1p(excess)) / (
        2.0 * excess * m.cross_section
    )


def gain_excess(m, p_in, i_in):
    """Solve the gain equation for d = G - 1 (elementwise over ``i_in``).

    The bracket comes from log1p(d) <= d:
        g / (2 i + 1) <= d <= min(g / (2 i), exp(g) - 1),  i = I / I_s,
    so it always contains the root and spans at most a factor exp(g).
    """
    i_in = np.asarray(i_in, dtype=float)
    if np.any(~(i_in > 0)) or np.any(~np.isfinite(i_in)):
        raise DomainError("input intensity must be positive and finite")
    g = gain_exponent(m, p_in)
    if g == 0.0:
        return np.zeros_like(i_in)
    i_rel = i_in / m.saturation_intensity
    lo = g / (2.0 * i_rel + 1.0)
    hi = np.minimum(g / (2.0 * i_rel), math.expm1(g))

    def residual(d):
        return (g - np.log1p(d)) / (2.0 * d) - i_rel

    d, *_ = bisect_decreasing(residual, lo, hi)
    return d


def power_gain(m, p_in, i_in):
    """Saturated power gain G(i_in) in (1, exp(g)); scalar in, scalar out."""
    d = gain_excess(m, p_in, i_in)
    out = 1.0 + d
    return float(out) if out.ndim == 0 else out


def output_intensity(m, p_in, i_in):
    """Amplified intensity G(i_in) * i_in."""
    i_in = np.asarray(i_in, dtype=float)
    out = (1.0 + gain_excess(m, p_in, i_in)) * i_in
    return float(out) if out.ndim == 0 else out


def gain_derivative(m, p_in, i_in):
    """Analytic dG/dI = (1 - G) / (I + I_s / (2 G)) at the solved gain."""
    i_in = np.asarray(i_in, dtype=float)
    gain = 1.0 + gain_excess(m, p_in, i_in)
    out = (1.0 - gain) / (i_in + m.saturation_intensity / (2.0 * gain))
    return float(out) if out.ndim == 0 else out
