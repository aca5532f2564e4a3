"""Joint bisection / exhaustive grid search over splitting ratio and pre-gain amplitude.

For every splitting ratio on the grid the stable power P_t is found by
bisection; then the pre-gain amplitude A_hat is scanned, the compensation
amplitude is A = sqrt(h(A_hat)), mu1 = A_hat / A and the peak received
power is (sqrt(h(A_hat)) - A_hat)^2 alpha delta / 4. The upper bound is
strictly increasing in the peak power, so the winning cell is keyed on it;
the lower bound is only evaluated at the winner.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math
import os

import numpy as np

from rbcom.beam import BeamGeometry, link_loss
from rbcom.capacity import (
    PeakSnrPoint,
    capacity_bounds,
    lower_bound_bits,
    upper_bound_bits,
)
from rbcom.errors import DomainError, NumericalFailure
from rbcom.gain import GainMedium
from rbcom.link import round_trip_ratio
from rbcom.resonance import alpha_upper_bound, stable_powers, threshold_power

log = logging.getLogger(__name__)

_ROW_ELEMENTS = 1 << 18


@dataclass(frozen=True)
class OptimizerConfig:
    medium: GainMedium
    geometry: BeamGeometry
    pump_power: float  # W
    sigma2: float  # noise variance N_0 B, W
    p_r_max: float  # photodetector power cap, W
    k1: int = 1000
    k2: int = 1000

    def __post_init__(self):
        if self.k1 < 2 or self.k2 < 2:
            raise ValueError(f"grid counts must be >= 2, got k1={self.k1}, k2={self.k2}")
        if not self.sigma2 > 0:
            raise ValueError(f"noise variance must be > 0, got {self.sigma2}")
        if not self.p_r_max > 0:
            raise ValueError(f"maximum received power must be > 0, got {self.p_r_max}")
        if not self.pump_power >= 0:
            raise ValueError(f"pump power must be >= 0, got {self.pump_power}")


@dataclass(frozen=True)
class Optimum:
    c_up_star: float
    c_low_star: float
    alpha_star: float
    a_hat_star: float
    a_star: float
    mu1_star: float
    p_t_star: float
    p_peak_star: float
    link_loss: float = math.nan
    threshold_power: float = math.nan

    @property
    def is_zero(self):
        return self.c_up_star == 0.0


def _zero(delta, p_th):
    return Optimum(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, delta, p_th)


def evaluate_candidate(cfg, alpha, a_hat, p_t):
    """Peak power and capacity bounds of one grid cell.

    Returns None when the cell violates a constraint (infeasible splitting
    ratio, amplitude outside (0, sqrt(P_t)], or returned power above
    min(P_t, P_r,max / (alpha delta))).
    """
    delta = link_loss(cfg.geometry)
    u = alpha_upper_bound(cfg.medium, cfg.pump_power, delta)
    if not 0 < alpha < u:
        return None
    if not 0 < a_hat <= math.sqrt(p_t) * (1.0 + 1e-12):
        return None
    ratio = float(round_trip_ratio(cfg.medium, cfg.pump_power, alpha, delta, a_hat**2))
    h = ratio * a_hat**2
    if h > min(p_t * (1.0 + 1e-12), cfg.p_r_max / (alpha * delta)):
        return None
    p_peak = a_hat**2 * (math.sqrt(ratio) - 1.0) ** 2 * alpha * delta / 4.0
    return p_peak, capacity_bounds(PeakSnrPoint(p_peak, cfg.sigma2))


def _default_workers():
    try:
        return max(1, int(os.environ.get("RBCOM_THREADS", "1")))
    except ValueError:
        return 1


def _scan_rows(cfg, delta, alphas, p_t, fractions):
    """Peak power over the (alpha, A_hat) grid rows given; invalid cells are -1."""
    budget = np.minimum(p_t, cfg.p_r_max / (alphas * delta))
    a_hat = np.sqrt(budget)[:, None] * fractions[None, :]
    x_sq = a_hat**2
    ratio = round_trip_ratio(cfg.medium, cfg.pump_power, alphas[:, None], delta, x_sq)
    h = ratio * x_sq
    ok = h <= (cfg.p_r_max / (alphas * delta))[:, None]
    ok &= h <= p_t[:, None] * (1.0 + 1e-12)
    p_peak = x_sq * (np.sqrt(ratio) - 1.0) ** 2 * (alphas * delta)[:, None] / 4.0
    return np.where(ok, p_peak, -1.0), a_hat, ratio


def optimize(cfg, workers=None):
    """Maximise the capacity upper bound over the (alpha, A_hat) grid.

    Returns the all-zero optimum when the pump power does not exceed the
    threshold. Ties go to the lowest alpha index, then the lowest A_hat
    index, independently of ``workers``.
    """
    delta = link_loss(cfg.geometry)
    p_th = threshold_power(cfg.medium, delta)
    if cfg.pump_power <= p_th:
        return _zero(delta, p_th)
    u = alpha_upper_bound(cfg.medium, cfg.pump_power, delta)
    if u <= 0:
        return _zero(delta, p_th)

    alphas = u * np.arange(1, cfg.k1) / cfg.k1
    try:
        p_t, *_ = stable_powers(cfg.medium, cfg.pump_power, alphas, delta)
    except NumericalFailure as exc:
        exc.diagnostics.setdefault("stage", "stable power")
        raise
    fractions = np.arange(1, cfg.k2) / cfg.k2

    rows_per_chunk = max(1, _ROW_ELEMENTS // fractions.size)
    chunks = [slice(i, i + rows_per_chunk) for i in range(0, alphas.size, rows_per_chunk)]

    def run(sl):
        try:
            return _scan_rows(cfg, delta, alphas[sl], p_t[sl], fractions)
        except NumericalFailure as exc:
            exc.diagnostics["alpha_range"] = (float(alphas[sl][0]), float(alphas[sl][-1]))
            raise

    workers = workers or _default_workers()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(sl) for sl in chunks]
    p_peak = np.concatenate([p[0] for p in parts])
    a_hat = np.concatenate([p[1] for p in parts])
    ratio = np.concatenate([p[2] for p in parts])

    c_up = np.where(p_peak >= 0.0, upper_bound_bits(np.maximum(p_peak, 0.0) / cfg.sigma2), -np.inf)
    best = int(np.argmax(c_up))  # first maximum in row-major order
    row, col = divmod(best, fractions.size)
    if not c_up.flat[best] > 0.0:
        return _zero(delta, p_th)
    if p_peak.flat[best] < p_peak.max() * (1.0 - 1e-12):
        raise NumericalFailure(
            "upper-bound argmax and peak-power argmax disagree",
            cell=(row, col),
        )

    a_hat_star = float(a_hat[row, col])
    a_star = a_hat_star * math.sqrt(float(ratio[row, col]))
    p_peak_star = float(p_peak[row, col])
    c_low = lower_bound_bits(p_peak_star / cfg.sigma2)
    log.debug("optimum at alpha=%g, A_hat=%g, P_peak=%g", alphas[row], a_hat_star, p_peak_star)
    return Optimum(
        c_up_star=float(c_up[row, col]),
        c_low_star=c_low,
        alpha_star=float(alphas[row]),
        a_hat_star=a_hat_star,
        a_star=a_star,
        mu1_star=a_hat_star / a_star,
        p_t_star=float(p_t[row]),
        p_peak_star=p_peak_star,
        link_loss=delta,
        threshold_power=p_th,
    )


def modulation_parameters(opt):
    """(A*, mu1*, P_t*) for building the compensated modulated symbols."""
    if opt.is_zero:
        raise DomainError("zero optimum: no resonance, nothing to modulate")
    return opt.a_star, opt.mu1_star, opt.p_t_star
