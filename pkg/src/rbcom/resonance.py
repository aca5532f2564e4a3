"""Resonance feasibility and the stable resonant-beam power P_t."""

from dataclasses import dataclass
import math

import numpy as np

from rbcom._roots import bisect_decreasing
from rbcom.errors import DomainError, NumericalFailure
from rbcom.link import gain_ratio, round_trip_ratio

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class StablePoint:
    p_t: float
    bracket_low: float
    bracket_high: float
    residual: float
    iterations: int


def threshold_power(m, delta):
    """Minimum pump power for a self-sustaining beam, -I_s S_0 ln(delta) / (2 eta)."""
    if not 0 < delta <= 1:
        raise DomainError(f"link loss must lie in (0, 1], got {delta}")
    return -m.saturation_power * math.log(delta) / (2.0 * m.pump_efficiency)


def alpha_upper_bound(m, p_in, delta):
    """Supremum of feasible splitting ratios, 1 - delta^-2 exp(-4 eta P_in / (I_s S_0)).

    A non-positive value means no splitting ratio can sustain resonance,
    which happens exactly when ``p_in`` does not exceed the threshold power.
    """
    if not 0 < delta <= 1:
        raise DomainError(f"link loss must lie in (0, 1], got {delta}")
    g = 2.0 * m.pump_efficiency * p_in / m.saturation_power
    # 1 - exp(-2g - 2 ln delta), written to stay exact near the threshold
    return -math.expm1(-2.0 * g - 2.0 * math.log(delta))


def _bounds(m, p_in, alpha, delta):
    two_eta_p = 2.0 * m.pump_efficiency * p_in
    ps = m.saturation_power
    alpha = np.asarray(alpha, dtype=float)
    lower = (two_eta_p + (math.log(delta) + np.log1p(-alpha)) * ps) / (
        2.0 * (1.0 - (1.0 - alpha) * delta)
    )
    upper = (two_eta_p + ps * math.log(delta)) / (2.0 * (1.0 - delta))
    return np.maximum(lower, 0.0), np.broadcast_to(upper, lower.shape).astype(float)


def stable_power_bounds(c):
    """Lower and upper bounds on P_t from the symmetric-loss argument (W)."""
    lo, hi = _bounds(c.medium, c.pump_power, c.split_ratio, c.link_loss)
    return float(lo), float(hi)


def _check_feasible(m, p_in, alpha, delta):
    u = alpha_upper_bound(m, p_in, delta)
    alpha = np.asarray(alpha, dtype=float)
    if u <= 0:
        raise DomainError(
            f"no resonance: pump power {p_in:g} W does not exceed the threshold "
            f"{threshold_power(m, delta):.6g} W"
        )
    bad = ~((alpha > 0) & (alpha < u))
    if np.any(bad):
        raise DomainError(
            f"splitting ratio must lie in (0, {u:.6g}) for resonance at P_in={p_in:g} W, "
            f"got {np.asarray(alpha)[bad].ravel()[0]:.6g}"
        )


def stable_powers(m, p_in, alphas, delta, *, expand_steps=10):
    """Stable power for several splitting ratios at fixed P_in and delta.

    Bisects g(P) = h(sqrt(P))/P - 1, which is strictly decreasing, over the
    analytic bounds. Returns ``(p_t, lower, upper, iterations)`` where
    ``lower``/``upper`` is the bracket actually used.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    _check_feasible(m, p_in, alphas, delta)
    lower, upper = _bounds(m, p_in, alphas, delta)
    # g(P) -> (1-alpha) delta^2 exp(2g) - 1 > 0 as P -> 0, so a tiny floor is safe
    lower = np.where(lower > 0.0, lower, 1e-9 * upper)
    upper = upper.copy()

    def g_of(p):
        return round_trip_ratio(m, p_in, alphas, delta, p) - 1.0

    # theory guarantees the bracket; expansion only absorbs round-off
    for _ in range(expand_steps + 1):
        g_lo = g_of(lower)
        g_hi = g_of(upper)
        ok = (g_lo >= 0.0) & (g_hi <= 0.0)
        if np.all(ok):
            break
        lower = np.where(g_lo >= 0.0, lower, lower * 0.99)
        upper = np.where(g_hi <= 0.0, upper, upper * 1.01)
    else:
        bad = int(np.flatnonzero(~ok)[0])
        raise NumericalFailure(
            "stable-power bracket shows no sign change after expansion",
            bracket=(float(lower[bad]), float(upper[bad])),
            alpha=float(alphas[bad]),
            g_low=float(g_lo[bad]),
            g_high=float(g_hi[bad]),
        )
    p_t, _, _, iters = bisect_decreasing(g_of, lower, upper, rtol=1e-13)
    return p_t, lower, upper, iters


def stable_power(c):
    """Stable resonant-beam power P_t solving h(sqrt(P_t)) = P_t."""
    p_t, lo, hi, iters = stable_powers(c.medium, c.pump_power, [c.split_ratio], c.link_loss)
    p = float(p_t[0])
    residual = abs(gain_ratio(c, math.sqrt(p)) - 1.0)
    if residual >= RESIDUAL_TOL:
        raise NumericalFailure(
            f"stable-power residual {residual:.3g} above tolerance", bracket=(lo[0], hi[0])
        )
    return StablePoint(p, float(lo[0]), float(hi[0]), residual, int(iters))
