import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import logsumexp
from scipy.stats import norm

from rbcom.capacity import (
    UPPER_BRANCH_SNR,
    PeakSnrPoint,
    capacity_bounds,
    capacity_lower,
    capacity_upper,
    centred_lattice,
    constellation_size,
    constellation_size_for_snr,
    lattice_mixture_entropy,
    lattice_mixture_logpdf,
    lattice_mixture_mass,
    lower_bound_bits,
    peak_power,
    upper_bound_bits,
)
from rbcom.errors import DomainError


def grid_lower_bound(snr, size):
    """Mixture entropy by brute-force trapezoid on a fine grid, then minus the noise entropy."""
    half = math.sqrt(snr)
    pts = np.linspace(-half, half, size)
    z = np.linspace(-half - 14, half + 14, 400001)
    f = norm.pdf(z[:, None] - pts[None, :]).mean(axis=1)
    ent = -np.trapezoid(np.where(f > 0, f * np.log(f), 0.0), z)
    return (ent - 0.5 * math.log(2 * math.pi * math.e)) / math.log(2)


def test_peak_power():
    assert peak_power(10.0, 0.5, 0.01, 0.5) == pytest.approx(0.03125, rel=1e-14)
    assert peak_power(3.0, 1.0, 0.01, 0.5) == 0.0
    with pytest.raises(DomainError):
        peak_power(1.0, 0.0, 0.01, 0.5)


def test_upper_bound_values():
    # 8 / (pi e (1 - 2/(pi e))^2) evaluates to 1.597402, not the 1.5973 sometimes quoted
    assert UPPER_BRANCH_SNR == pytest.approx(1.597402, abs=1e-6)
    assert upper_bound_bits(0.0) == 0.0
    assert upper_bound_bits(100.0) == pytest.approx(2.5459, abs=1e-4)
    assert capacity_upper(PeakSnrPoint(1.0, 0.01)) == pytest.approx(2.5459, abs=1e-4)
    # branches meet at the threshold
    lo = upper_bound_bits(np.nextafter(UPPER_BRANCH_SNR, 0))
    hi = upper_bound_bits(np.nextafter(UPPER_BRANCH_SNR, 10))
    assert hi == pytest.approx(lo, abs=1e-12)


def test_upper_bound_monotone_across_branch():
    snr = np.linspace(UPPER_BRANCH_SNR - 0.1, UPPER_BRANCH_SNR + 0.1, 20001)
    assert np.all(np.diff(upper_bound_bits(snr)) >= 0)
    wide = np.geomspace(1e-6, 1e12, 5000)
    assert np.all(np.diff(upper_bound_bits(wide)) > 0)


@pytest.mark.parametrize("snr, size", [(0.5, 2), (1.0, 2), (1.999, 2), (2.0, 3), (3.0, 3), (3.5, 4), (10.0, 10), (10.2, 11)])
def test_constellation_size(snr, size):
    assert constellation_size_for_snr(snr) == size


def test_zero_signal():
    pt = PeakSnrPoint(0.0, 1e-3)
    b = capacity_bounds(pt)
    assert (b.c_up, b.c_low, b.constellation_size) == (0.0, 0.0, 2)
    assert capacity_lower(pt) == 0.0


def test_snr_100():
    b = capacity_bounds(PeakSnrPoint(1.0, 0.01))
    assert b.c_up == pytest.approx(2.5459, abs=1e-4)
    assert 0 <= b.c_low <= b.c_up
    assert b.constellation_size == 100


@pytest.mark.parametrize("snr", [0.05, 1.0, 3.0, 12.0, 60.0])
def test_lower_bound_matches_grid_oracle(snr):
    size = constellation_size_for_snr(snr)
    assert lower_bound_bits(snr) == pytest.approx(grid_lower_bound(snr, size), abs=1e-8)


def test_single_component_is_gaussian():
    assert lattice_mixture_entropy(0.0, 0.0, 1) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-10)
    assert lower_bound_bits(25.0, size=1) == pytest.approx(0.0, abs=1e-10)


def test_two_points_far_apart_give_one_bit():
    assert lower_bound_bits(1e6, size=2) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("snr", [0.01, 1.0, 50.0, 1e4, 1e7])
def test_mixture_normalised(snr):
    size = constellation_size_for_snr(snr)
    first, step = centred_lattice(snr, size)
    assert lattice_mixture_mass(first, step, size) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("snr", [1e5, 1e7, 1.2e8])
def test_dense_density_matches_brute_force(snr):
    size = constellation_size_for_snr(snr)
    first, step = centred_lattice(snr, size)
    last = first + (size - 1) * step
    rng = np.random.default_rng(3)
    # near both ends, inside the flat region and in the tails
    z = np.concatenate([
        first + rng.uniform(-12, 40, 40),
        last - rng.uniform(-12, 40, 40),
        rng.uniform(first + 60, last - 60, 20),
    ])
    for zi in z:
        j = np.arange(max(0, int((zi - first) / step) - int(40 / step)), min(size, int((zi - first) / step) + int(40 / step) + 1))
        ref = logsumexp(-0.5 * (zi - first - j * step) ** 2) - 0.5 * math.log(2 * math.pi) - math.log(size)
        assert lattice_mixture_logpdf(zi, first, step, size) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_high_snr_lower_bound_close_to_upper():
    for snr in (1e3, 1e6, 1.2e8):
        b = capacity_bounds(PeakSnrPoint(snr, 1.0))
        assert 0 <= b.c_up - b.c_low < 0.3


def test_ordering_on_fig_axis():
    snr = np.geomspace(0.01, 1e4, 50)
    gaps = []
    for s in snr:
        b = capacity_bounds(PeakSnrPoint(s, 1.0))
        assert 0 <= b.c_low <= b.c_up
        gaps.append(b.c_up - b.c_low)
    assert max(gaps) < 0.6


def test_lower_bound_monotone_within_constellation_size():
    # with M held fixed the bound grows with SNR
    for lo, hi in [(0.01, 1.99), (2.0, 3.49), (3.5, 4.0), (7.01, 8.0), (40.01, 41.0)]:
        snr = np.linspace(lo, hi, 25)
        vals = [lower_bound_bits(s) for s in snr]
        assert np.all(np.diff(vals) > 0)


@pytest.mark.xfail(strict=True, reason="the lower bound drops each time the constellation grows by one point")
def test_lower_bound_monotone_on_100_point_grid():
    snr = np.geomspace(0.01, 1e4, 100)
    vals = [lower_bound_bits(s) for s in snr]
    assert np.all(np.diff(vals) >= 0)


def test_lower_bound_drops_at_size_step():
    assert lower_bound_bits(1.99) > lower_bound_bits(2.0)
    assert lower_bound_bits(3.49) > lower_bound_bits(3.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e8))
def test_bounds_ordered_property(snr):
    low = lower_bound_bits(snr)
    assert 0 <= low <= upper_bound_bits(snr) + 1e-12


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_lower_bound_rejects_bad_snr(bad):
    with pytest.raises(DomainError):
        lower_bound_bits(bad)
