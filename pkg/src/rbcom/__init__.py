"""Resonant beam communication (RBCom) channel model.

Quasi-static link between two retroreflectors: diffraction link loss,
saturated gain media, round-trip link gain, resonance stability,
amplitude-constrained AWGN capacity bounds, the bisection/grid-search
optimizer and a frame-level Monte-Carlo simulator.
"""

from rbcom.errors import DomainError, NumericalFailure, RBComError, SchemeInfeasible
from rbcom.units import Amplitude, IntensityWm2, PowerW, Ratio, dbm_to_watts, watts_to_dbm
from rbcom.beam import BeamGeometry, link_loss, spot_radius_sq, waist_radius
from rbcom.gain import GainMedium, gain_exponent, output_intensity, power_gain
from rbcom.link import ChannelPhysics, gain_ratio, invert_link_gain, link_gain_h
from rbcom.resonance import (
    StablePoint,
    alpha_upper_bound,
    stable_power,
    stable_power_bounds,
    threshold_power,
)
from rbcom.capacity import (
    CapacityBounds,
    PeakSnrPoint,
    capacity_bounds,
    capacity_lower,
    capacity_upper,
    constellation_size,
    peak_power,
)
from rbcom.optimizer import (
    OptimizerConfig,
    Optimum,
    evaluate_candidate,
    modulation_parameters,
    optimize,
)
from rbcom.channel_sim import (
    Constellation,
    FrameScheme,
    FrameTrace,
    compensated_modulated_symbol,
    empirical_mutual_information,
    raw_markov_step,
    simulate,
)

__version__ = "0.1.0"
