"""Parameter sweeps that tabulate link, resonance and optimizer quantities."""

import math

import numpy as np

from rbcom.beam import link_loss
from rbcom.config import UNITS, ConfigError
from rbcom.errors import DomainError
from rbcom.optimizer import optimize
from rbcom.resonance import alpha_upper_bound, stable_power, threshold_power

# name -> (unit, needs optimizer)
QUANTITIES = {
    "delta": ("1", False),
    "delta_db": ("dB", False),
    "pth": ("W", False),
    "alpha_max": ("1", False),
    "pt": ("W", False),
    "ppeak": ("W", True),
    "cup": ("bits/use", True),
    "clow": ("bits/use", True),
    "alpha": ("1", True),
    "ahat": ("sqrt(W)", True),
    "a": ("sqrt(W)", True),
    "mu1": ("1", True),
    "pt_star": ("W", True),
    "clow_per_pin": ("bits/use/W", True),
}

SWEEPABLE = ("wavelength", "phi", "L", "r0", "I_s", "eta", "P_in", "B", "N0", "P_r_max", "S_s", "alpha")

# rod radius x diffraction angle combinations used by --cases reference
REFERENCE_CASES = ((3e-3, 0.2e-3), (3e-3, 0.3e-3), (5e-3, 0.2e-3), (5e-3, 0.3e-3))


def sweep_values(start, stop, count, log=False):
    if count < 2:
        raise ConfigError("sweep count must be >= 2")
    if not start < stop:
        raise ConfigError(f"sweep bounds must be ordered, got {start} .. {stop}")
    if log:
        if start <= 0:
            raise ConfigError("log sweep needs a positive start")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def parse_emit(spec):
    names = [s.strip() for s in spec.split(",") if s.strip()]
    if not names:
        raise ConfigError("--emit needs at least one quantity")
    for n in names:
        if n not in QUANTITIES:
            raise ConfigError(f"unknown quantity {n!r}; choose from {', '.join(QUANTITIES)}")
    return names


def header(var, emit, with_cases=False):
    cols = []
    if with_cases:
        cols += ["r0 [m]", "phi [rad]"]
    cols.append(f"{var} [{UNITS[var]}]")
    cols += [f"{n} [{QUANTITIES[n][0]}]" for n in emit]
    return cols


def evaluate(cfg, emit, workers=None):
    """Values of the requested quantities for one configuration."""
    medium = cfg.medium()
    delta = link_loss(cfg.geometry())
    row = {}
    if "delta" in emit:
        row["delta"] = delta
    if "delta_db" in emit:
        row["delta_db"] = 10.0 * math.log10(delta)
    if "pth" in emit:
        row["pth"] = threshold_power(medium, delta)
    if "alpha_max" in emit:
        row["alpha_max"] = alpha_upper_bound(medium, cfg.P_in, delta)
    if "pt" in emit:
        try:
            row["pt"] = stable_power(cfg.physics(delta)).p_t
        except DomainError:
            row["pt"] = 0.0
    if any(QUANTITIES[n][1] for n in emit):
        opt = optimize(cfg.optimizer_config(), workers=workers)
        row.update(
            ppeak=opt.p_peak_star,
            cup=opt.c_up_star,
            clow=opt.c_low_star,
            alpha=opt.alpha_star,
            ahat=opt.a_hat_star,
            a=opt.a_star,
            mu1=opt.mu1_star,
            pt_star=opt.p_t_star,
            clow_per_pin=opt.c_low_star / cfg.P_in if cfg.P_in > 0 else 0.0,
        )
    return [row[n] for n in emit]


def run_sweep(cfg, var, values, emit, cases=None, workers=None):
    """Yield CSV rows (lists of numbers) for every case and swept value."""
    if var not in SWEEPABLE:
        raise ConfigError(f"cannot sweep {var!r}; choose from {', '.join(SWEEPABLE)}")
    for case in cases or [None]:
        base = cfg if case is None else cfg.with_values(r0=case[0], phi=case[1])
        for v in values:
            point = base.with_values(**{var: float(v)})
            prefix = [] if case is None else [case[0], case[1]]
            yield prefix + [float(v)] + evaluate(point, emit, workers)
