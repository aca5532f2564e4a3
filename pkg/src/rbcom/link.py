"""Round-trip link gain h(x).

h maps the transmitted amplitude x of a symbol to the power that comes
back out of the transmitter's gain medium one reflection round later:
receiver split (1 - alpha), receiver gain, return loss delta, transmitter
gain. Both rods are the same ``GainMedium`` and share the pump power.
"""

from dataclasses import dataclass

import numpy as np

from rbcom._roots import bisect_decreasing
from rbcom.errors import DomainError
from rbcom.gain import GainMedium, gain_excess


@dataclass(frozen=True)
class ChannelPhysics:
    medium: GainMedium
    pump_power: float  # P_in, W
    split_ratio: float  # alpha
    link_loss: float  # delta

    def __post_init__(self):
        if not self.pump_power >= 0:
            raise ValueError(f"pump power must be >= 0, got {self.pump_power}")
        if not 0 < self.split_ratio < 1:
            raise ValueError(f"splitting ratio must lie in (0, 1), got {self.split_ratio}")
        if not 0 < self.link_loss <= 1:
            raise ValueError(f"link loss must lie in (0, 1], got {self.link_loss}")


def round_trip_ratio(medium, p_in, alpha, delta, x_sq):
    """h/x^2 for arrays of splitting ratio and transmitted power x^2.

    Follows the physical chain: receiver input intensity, receiver gain,
    return loss, transmitter gain. Broadcasts ``alpha`` against ``x_sq``.
    """
    s0 = medium.cross_section
    alpha, x_sq = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(x_sq, dtype=float))
    i_rx_in = (1.0 - alpha) * delta * x_sq / s0
    d_rx = gain_excess(medium, p_in, i_rx_in)
    i_tx_in = delta * (1.0 + d_rx) * i_rx_in
    d_tx = gain_excess(medium, p_in, i_tx_in)
    return (1.0 - alpha) * delta**2 * (1.0 + d_rx) * (1.0 + d_tx)


def _as_out(a):
    return float(a) if np.ndim(a) == 0 else a


def _check_amplitude(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise DomainError("transmitted amplitude must be positive and finite")
    return x


def gain_ratio(c, x):
    """h(x) / x^2 = (1 - alpha) delta^2 G_rx G_tx; decreasing in x."""
    x = _check_amplitude(x)
    return _as_out(round_trip_ratio(c.medium, c.pump_power, c.split_ratio, c.link_loss, x**2))


def link_gain_h(c, x):
    """Power returned to the transmitter output after one round trip (W)."""
    x = _check_amplitude(x)
    return _as_out(gain_ratio(c, x) * x**2)


def gain_ratio_limit(c):
    """Small-signal limit of h(x)/x^2, (1 - alpha) delta^2 exp(2 g); a strict upper bound."""
    g = 2.0 * c.medium.pump_efficiency * c.pump_power / c.medium.saturation_power
    return (1.0 - c.split_ratio) * c.link_loss**2 * np.exp(2.0 * g)


def invert_link_gain(c, a, p_t=None):
    """Amplitude x in (0, sqrt(P_t)] with sqrt(h(x)) = a.

    ``p_t`` is the stable power of ``c``; it is solved for when omitted.
    Raises DomainError when ``a`` is outside the attainable interval.
    """
    if p_t is None:
        from rbcom.resonance import stable_power

        p_t = stable_power(c).p_t
    a_arr = np.asarray(a, dtype=float)
    x_top = np.sqrt(p_t)
    x_lo = 1e-12 * x_top
    x_hi = x_top * (1.0 + 1e-9)
    a_min = np.sqrt(link_gain_h(c, x_lo))
    a_max = np.sqrt(link_gain_h(c, x_hi))
    if np.any(a_arr < a_min) or np.any(a_arr > a_max) or np.any(~np.isfinite(a_arr)):
        raise DomainError(
            f"amplitude must lie in [{a_min:.6g}, {a_max:.6g}] sqrt(W) "
            f"(range of sqrt(h) over (0, sqrt(P_t)])"
        )
    target = a_arr**2

    def decreasing(x):
        return target - link_gain_h(c, x)

    x, *_ = bisect_decreasing(
        decreasing, np.full_like(a_arr, x_lo), np.full_like(a_arr, x_hi), geometric=True
    )
    return _as_out(x)
