"""Frame-level simulation of the echo channel and the compensation scheme.

Each frame carries N data slots (the synchronisation header is assumed
ideal and carries nothing). Slot n of frame k is transmitted as

    x_1 = sqrt(P_t) m_1,   x_k = sqrt(h(x_{k-1})) m_k,

and received as y = sqrt(alpha delta) x + noise. With the compensation
m_k = A s_k / sqrt(h(A s_{k-1})) the transmitted symbol collapses to A s_k.
"""

from dataclasses import dataclass, field
import csv
import math

import numpy as np

from rbcom.capacity import constellation_size_for_snr, lattice_mixture_logpdf
from rbcom.errors import DomainError, SchemeInfeasible
from rbcom.link import link_gain_h

RNG_ALGORITHM = "numpy.random.PCG64"
# relative slack on the unit bound of weights/modulated symbols (rounding only)
_UNIT_SLACK = 1e-12


@dataclass(frozen=True)
class Constellation:
    """``size`` equally spaced information symbols on [low, high]."""

    low: float
    high: float
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("constellation needs at least one point")
        if not 0 < self.low <= self.high <= 1:
            raise ValueError(f"constellation must lie in (0, 1], got [{self.low}, {self.high}]")

    @property
    def step(self):
        return 0.0 if self.size == 1 else (self.high - self.low) / (self.size - 1)

    def symbol(self, index):
        index = np.asarray(index)
        if self.size == 1:
            return np.full(index.shape, self.low)
        # endpoints hit exactly
        return np.where(index == self.size - 1, self.high, self.low + index * self.step)

    def values(self):
        return self.symbol(np.arange(self.size))


@dataclass(frozen=True)
class FrameScheme:
    a: float  # compensated channel amplitude A
    mu1: float  # lowest information symbol
    p_t: float  # stable power
    n_symbols: int
    constellation: Constellation

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ValueError("a frame needs at least one data slot")
        if not 0 < self.a <= math.sqrt(self.p_t) * (1.0 + 1e-12):
            raise ValueError(f"A must lie in (0, sqrt(P_t)], got {self.a}")
        if self.constellation.low < self.mu1 * (1.0 - 1e-12):
            raise ValueError("constellation extends below mu1")


def scheme_for(a, mu1, p_t, alpha, delta, sigma2, n_symbols, size=None):
    """Frame scheme with the lower-bound input: M points on [mu1, 1].

    M follows the peak-SNR rule unless ``size`` is given.
    """
    p_peak = (1.0 - mu1) ** 2 * alpha * delta * a**2 / 4.0
    if size is None:
        size = constellation_size_for_snr(p_peak / sigma2)
    return FrameScheme(a, mu1, p_t, n_symbols, Constellation(mu1, 1.0, size))


@dataclass(frozen=True)
class FrameTrace:
    """Per-frame, per-slot sequences; arrays have shape (frames, slots)."""

    s: np.ndarray
    m: np.ndarray
    x: np.ndarray
    y: np.ndarray
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def frames(self):
        return self.x.shape[0]

    @property
    def slots(self):
        return self.x.shape[1]

    def write_csv(self, fh):
        """Write frame, slot, s, m, x, y rows (1-based indices, full precision)."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame [index]", "slot [index]", "s [1]", "m [1]", "x [sqrt(W)]", "y [sqrt(W)]"])
        for k in range(self.frames):
            for n in range(self.slots):
                w.writerow(
                    [
                        k + 1,
                        n + 1,
                        f"{self.s[k, n]:.17e}",
                        f"{self.m[k, n]:.17e}",
                        f"{self.x[k, n]:.17e}",
                        f"{self.y[k, n]:.17e}",
                    ]
                )


def raw_markov_step(c, x_prev, m, p_t):
    """Transmitted amplitude for modulated symbol ``m``; ``x_prev=None`` is frame 1."""
    m = np.asarray(m, dtype=float)
    if np.any(~((m > 0) & (m <= 1))):
        raise DomainError("modulated symbol must lie in (0, 1]")
    if x_prev is None:
        out = math.sqrt(p_t) * m
    else:
        out = np.sqrt(link_gain_h(c, x_prev)) * m
    return float(out) if np.ndim(out) == 0 else out


def compensation_weight(sch, c, s_prev):
    """w = A / sqrt(h(A s_prev)) (or A / sqrt(P_t) in frame 1)."""
    if s_prev is None:
        return sch.a / math.sqrt(sch.p_t)
    return sch.a / np.sqrt(link_gain_h(c, sch.a * np.asarray(s_prev, dtype=float)))


def compensated_modulated_symbol(sch, c, s_k, s_prev):
    """Modulated symbol that turns the echo channel into x = A s_k.

    Raises SchemeInfeasible when the required weight exceeds 1, which is
    exactly what happens when mu1 < A_hat / A.
    """
    w = np.asarray(compensation_weight(sch, c, s_prev), dtype=float)
    m = w * np.asarray(s_k, dtype=float)
    if np.any(w > 1.0 + _UNIT_SLACK) or np.any(m > 1.0 + _UNIT_SLACK):
        raise SchemeInfeasible(
            f"compensation weight {float(np.max(w)):.12g} exceeds 1: "
            f"mu1={sch.mu1:.12g} is below A_hat/A"
        )
    m = np.minimum(m, 1.0)
    return float(m) if m.ndim == 0 else m


def _draw_symbols(sch, rng, k_frames):
    idx = rng.integers(0, sch.constellation.size, size=(k_frames, sch.n_symbols))
    return sch.constellation.symbol(idx)


def simulate(sch, c, sigma2, k_frames, seed):
    """Run ``k_frames`` frames of the compensated scheme through the echo channel.

    Information symbols are i.i.d. uniform over the constellation, noise is
    N(0, sigma2); both come from one PCG64 stream seeded with ``seed``
    (symbols drawn first, then noise). The transmitted amplitude is
    propagated through the actual recursion, so x == A s is a check, not an
    assumption.
    """
    if k_frames < 1:
        raise ValueError("need at least one frame")
    if sigma2 < 0:
        raise ValueError("noise variance must be >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    s = _draw_symbols(sch, rng, k_frames)
    noise = rng.normal(0.0, math.sqrt(sigma2), size=s.shape) if sigma2 > 0 else np.zeros_like(s)

    m = np.empty_like(s)
    m[0] = compensated_modulated_symbol(sch, c, s[0], None)
    if k_frames > 1:
        w = sch.a / np.sqrt(link_gain_h(c, sch.a * s[:-1]))
        bad = w > 1.0 + _UNIT_SLACK
        if np.any(bad):
            k, n = np.argwhere(bad)[0]
            raise SchemeInfeasible(
                f"compensation weight {w[k, n]:.12g} exceeds 1 at frame {k + 2}, slot {n + 1}",
                frame=int(k + 2),
                slot=int(n + 1),
            )
        m[1:] = np.minimum(w * s[1:], 1.0)

    x = np.empty_like(s)
    x[0] = raw_markov_step(c, None, m[0], sch.p_t)
    for k in range(1, k_frames):
        x[k] = raw_markov_step(c, x[k - 1], m[k], sch.p_t)
    y = math.sqrt(c.split_ratio * c.link_loss) * x + noise
    return FrameTrace(s, m, x, y, seed, {"rng": RNG_ALGORITHM})


def simulate_uncompensated(c, p_t, k_frames, n_symbols, seed, m_low=0.9):
    """Echo channel driven by i.i.d. uniform modulated symbols on [m_low, 1] (no compensation).

    Deep modulation starves the resonator: once E[ln m] falls below
    -ln sqrt of the small-signal round-trip ratio the chain drifts to zero.
    """
    if not 0 < m_low <= 1:
        raise ValueError("m_low must lie in (0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    m = rng.uniform(m_low, 1.0, size=(k_frames, n_symbols))
    m[m == 0.0] = m_low
    x = np.empty_like(m)
    x[0] = raw_markov_step(c, None, m[0], p_t)
    for k in range(1, k_frames):
        x[k] = raw_markov_step(c, x[k - 1], m[k], p_t)
    return m, x


def empirical_mutual_information(trace, sch, alpha, delta, sigma2):
    """Monte-Carlo estimate of I(s; y) in bits per channel use.

    Averages log2 p(y | s) - log2 f(y) over the trace with the exact
    conditional and mixture densities of the discrete uniform input.
    """
    if not sigma2 > 0:
        # noiseless: y identifies s exactly
        return math.log2(sch.constellation.size)
    sigma = math.sqrt(sigma2)
    gain = math.sqrt(alpha * delta) * sch.a / sigma
    z = trace.y.ravel() / sigma
    centre = gain * trace.s.ravel()
    log_cond = -0.5 * (z - centre) ** 2 - 0.5 * math.log(2.0 * math.pi)
    const = sch.constellation
    log_mix = lattice_mixture_logpdf(z, gain * const.low, gain * const.step, const.size)
    return float(np.mean(log_cond - log_mix) / math.log(2.0))
