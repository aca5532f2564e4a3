"""Amplitude-constrained AWGN capacity bounds.

The upper bound is the two-branch closed form; the lower bound is the
mutual information of an M-point equiprobable, equally spaced input whose
amplitudes span [-sqrt(P_peak), +sqrt(P_peak)], i.e. the differential
entropy of a Gaussian mixture minus the noise entropy.

All mixture computations are done in noise-normalised units (sigma = 1);
the entropy difference depends only on the peak SNR.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate
from scipy.special import log_ndtr, logsumexp

from rbcom.errors import DomainError, NumericalFailure

LN2 = math.log(2.0)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_GAUSS_ENTROPY = 0.5 * math.log(2.0 * math.pi * math.e)

# peak SNR above which the square-root branch of the upper bound applies
UPPER_BRANCH_SNR = 8.0 / (math.pi * math.e * (1.0 - 2.0 / (math.pi * math.e)) ** 2)

# support half-width for the entropy integral, in noise standard deviations
TAIL_SIGMAS = 10.0
# components farther than this from y are below double precision relative to the nearest
_WINDOW_SIGMAS = 15.0
_DIRECT_HALF_WINDOW = 256
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class PeakSnrPoint:
    p_peak: float  # W
    sigma2: float  # noise variance, W

    def __post_init__(self):
        if not (self.p_peak >= 0 and math.isfinite(self.p_peak)):
            raise ValueError(f"peak power must be finite and >= 0, got {self.p_peak}")
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise ValueError(f"noise variance must be finite and > 0, got {self.sigma2}")

    @property
    def snr(self):
        return self.p_peak / self.sigma2


@dataclass(frozen=True)
class CapacityBounds:
    c_up: float  # bits per channel use
    c_low: float
    constellation_size: int


def peak_power(a, mu1, alpha, delta):
    """Peak received power (1 - mu1)^2 alpha delta a^2 / 4 (W)."""
    if not 0 < mu1 <= 1:
        raise DomainError(f"mu1 must lie in (0, 1], got {mu1}")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0 < delta <= 1:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    return (1.0 - mu1) ** 2 * alpha * delta * a**2 / 4.0


def upper_bound_bits(snr):
    """Capacity upper bound as a function of peak SNR; accepts arrays."""
    snr = np.asarray(snr, dtype=float)
    high = np.log2(1.0 + np.sqrt(2.0 * snr / (math.pi * math.e)))
    low = 0.5 * np.log2(1.0 + snr)
    out = np.where(snr > UPPER_BRANCH_SNR, high, low)
    return float(out) if out.ndim == 0 else out


def capacity_upper(pt):
    return upper_bound_bits(pt.snr)


def constellation_size_for_snr(snr):
    if snr < 2.0:
        return 2
    if snr < 3.5:
        return 3
    return int(math.ceil(snr))


def constellation_size(pt):
    """Number of equally spaced input points used for the lower bound."""
    return constellation_size_for_snr(pt.snr)


# -- Gaussian mixture on an equally spaced lattice (unit noise variance) --


def _direct_logsum(z, first, step, count, half_window):
    """log sum_j phi(z - first - j step) over the components near each z."""
    out = np.empty_like(z)
    width = 2 * half_window + 1
    offsets = np.arange(-half_window, half_window + 1)
    chunk = max(1, _CHUNK_ELEMENTS // width)
    for start in range(0, z.size, chunk):
        zc = z[start : start + chunk]
        centre = np.clip(np.rint((zc - first) / step), 0, count - 1).astype(np.int64)
        idx = centre[:, None] + offsets[None, :]
        valid = (idx >= 0) & (idx < count)
        d = zc[:, None] - (first + idx * step)
        terms = np.where(valid, -0.5 * d * d, -np.inf)
        out[start : start + chunk] = logsumexp(terms, axis=1)
    return out - _HALF_LOG_2PI


def _theta_logsum(z, first, step):
    """log of the infinite lattice sum via its Fourier series (Poisson summation)."""
    phase = 2.0 * math.pi * (z - first) / step
    total = np.ones_like(z)
    k = 1
    while True:
        weight = math.exp(-2.0 * (math.pi * k / step) ** 2)
        if weight < 1e-18:
            break
        total += 2.0 * weight * np.cos(k * phase)
        k += 1
    return np.log(total) - math.log(step)


# Bernoulli numbers B_2k / (2k)! for the Euler-Maclaurin end corrections
_EM_COEFFS = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160, -691 / 1307674368000)


def _one_sided_logsum(u, step):
    """log sum_{i>=0} phi(u - i*step) for a dense half-infinite lattice.

    Euler-Maclaurin: Phi(u)/step + phi(u)/2 - sum_k c_k step^(2k-1) He_(2k-1)(u) phi(u).
    For step below ~0.06 the neglected terms are below double precision.
    """
    log_phi = -0.5 * u * u - _HALF_LOG_2PI
    # ratio of the end corrections to phi(u)
    he_prev, he = np.ones_like(u), u.copy()  # He_0, He_1
    corr = 0.5 - _EM_COEFFS[0] * step * he
    for k, coeff in enumerate(_EM_COEFFS[1:], start=2):
        for n in (2 * k - 3, 2 * k - 2):  # advance to He_(2k-1)
            he_prev, he = he, u * he - n * he_prev
        corr = corr - coeff * step ** (2 * k - 1) * he
    main = log_ndtr(u) - math.log(step)
    return main + np.log1p(corr * np.exp(log_phi - main))


def lattice_mixture_logpdf(z, first, step, count):
    """Log density of (1/M) sum_i N(z; first + i*step, 1), i = 0..M-1.

    Sparse lattices are summed directly over the components within 15 sigma
    of ``z``. Dense lattices (more than 256 components per window) use the
    Fourier form of the periodic sum away from the ends and Euler-Maclaurin
    end corrections near them; both are exact to double precision there.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).ravel()
    count = int(count)
    if count < 1:
        raise DomainError("mixture needs at least one component")
    if count == 1 or step == 0.0:
        out = -0.5 * (z - first) ** 2 - _HALF_LOG_2PI
    else:
        half_window = int(math.ceil(_WINDOW_SIGMAS / step))
        last = first + (count - 1) * step
        if not _is_dense(step, count):
            out = _direct_logsum(z, first, step, count, half_window)
        else:
            out = np.empty_like(z)
            interior = (z >= first + _WINDOW_SIGMAS + step) & (z <= last - _WINDOW_SIGMAS - step)
            out[interior] = _theta_logsum(z[interior], first, step)
            left = ~interior & (z < 0.5 * (first + last))
            right = ~interior & ~left
            out[left] = _one_sided_logsum(z[left] - first, step)
            out[right] = _one_sided_logsum(last - z[right], step)
    out = out - math.log(count)
    return float(out[0]) if scalar else out


def _is_dense(step, count):
    span = (count - 1) * step
    return (
        math.ceil(_WINDOW_SIGMAS / step) > _DIRECT_HALF_WINDOW
        and span > 2.0 * (_WINDOW_SIGMAS + 2.0)
    )


def _support_pieces(first, step, count):
    """Integration pieces covering every component +/- TAIL_SIGMAS.

    Pieces are at most 2 sigma wide, except the flat interior of a dense
    lattice, which is one piece.
    """
    centres_span = []
    if count == 1 or step == 0.0:
        centres_span.append((first - TAIL_SIGMAS, first + TAIL_SIGMAS))
    elif step < 2.0 * TAIL_SIGMAS:
        centres_span.append((first - TAIL_SIGMAS, first + (count - 1) * step + TAIL_SIGMAS))
    else:
        for i in range(count):
            c = first + i * step
            centres_span.append((c - TAIL_SIGMAS, c + TAIL_SIGMAS))

    dense = count > 1 and step > 0 and _is_dense(step, count)
    edges = []
    for lo, hi in centres_span:
        if dense:
            flat_lo = first + _WINDOW_SIGMAS + 2.0 * step + 1.0
            flat_hi = first + (count - 1) * step - _WINDOW_SIGMAS - 2.0 * step - 1.0
            if flat_hi > flat_lo:
                left = np.linspace(lo, flat_lo, int(math.ceil((flat_lo - lo) / 2.0)) + 1)
                right = np.linspace(flat_hi, hi, int(math.ceil((hi - flat_hi) / 2.0)) + 1)
                pts = np.concatenate([left, right])
                edges.extend(zip(pts[:-1], pts[1:]))
                continue
        pts = np.linspace(lo, hi, int(math.ceil((hi - lo) / 2.0)) + 1)
        edges.extend(zip(pts[:-1], pts[1:]))
    return edges


def _integrate_pieces(func, pieces):
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for a, b in pieces:
                val, _ = integrate.quad(func, a, b, epsabs=1e-14, epsrel=1e-10, limit=200)
                total += val
        except integrate.IntegrationWarning as exc:
            raise NumericalFailure(f"mixture quadrature did not converge: {exc}") from exc
    return total


def lattice_mixture_entropy(first, step, count):
    """Differential entropy (nats) of the unit-variance lattice mixture."""

    def integrand(z):
        lp = lattice_mixture_logpdf(z, first, step, count)
        return -math.exp(lp) * lp if lp > -745.0 else 0.0

    return _integrate_pieces(integrand, _support_pieces(first, step, count))


def lattice_mixture_mass(first, step, count):
    """Integral of the mixture density over the truncated support (should be ~1)."""

    def integrand(z):
        return math.exp(lattice_mixture_logpdf(z, first, step, count))

    return _integrate_pieces(integrand, _support_pieces(first, step, count))


def centred_lattice(snr, size):
    """(first, step) of ``size`` points spanning [-sqrt(snr), sqrt(snr)]."""
    half = math.sqrt(snr)
    if size == 1:
        return 0.0, 0.0
    return -half, 2.0 * half / (size - 1)


def lower_bound_bits(snr, size=None):
    """Capacity lower bound at peak SNR ``snr``; ``size`` overrides M."""
    if not (snr >= 0 and math.isfinite(snr)):
        raise DomainError(f"peak SNR must be finite and >= 0, got {snr}")
    if snr == 0.0:
        return 0.0
    if size is None:
        size = constellation_size_for_snr(snr)
    first, step = centred_lattice(snr, size)
    h_nats = lattice_mixture_entropy(first, step, size)
    return max(0.0, (h_nats - _GAUSS_ENTROPY) / LN2)


def capacity_lower(pt, size=None):
    return lower_bound_bits(pt.snr, size)


def capacity_bounds(pt):
    c_up = capacity_upper(pt)
    c_low = capacity_lower(pt)
    if c_low > c_up:
        raise NumericalFailure(
            f"lower bound {c_low:.6g} exceeds upper bound {c_up:.6g} at SNR {pt.snr:.6g}"
        )
    return CapacityBounds(c_up, c_low, constellation_size(pt))
