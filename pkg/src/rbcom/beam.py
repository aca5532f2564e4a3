"""Gaussian-beam diffraction between transmitter and receiver apertures."""

from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class BeamGeometry:
    """Link geometry in SI units.

    wavelength (m), diffraction_angle (rad, far-field half angle),
    distance (m) and receiver_area (m^2) of the receiving retroreflector.
    """

    wavelength: float
    diffraction_angle: float
    distance: float
    receiver_area: float

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if not self.diffraction_angle > 0:
            raise ValueError(f"diffraction angle must be > 0, got {self.diffraction_angle}")
        if not self.distance >= 0:
            raise ValueError(f"distance must be >= 0, got {self.distance}")
        if not self.receiver_area > 0:
            raise ValueError(f"receiver area must be > 0, got {self.receiver_area}")


def waist_radius(g):
    """Beam waist radius lambda / (pi * phi) in metres."""
    return g.wavelength / (math.pi * g.diffraction_angle)


def spot_radius_sq(g):
    """Squared spot radius at the receiver, w0^2 * (1 + (lambda L / (pi w0^2))^2)."""
    w0_sq = waist_radius(g) ** 2
    return w0_sq * (1.0 + (g.wavelength * g.distance / (math.pi * w0_sq)) ** 2)


def link_loss(g):
    """Fraction of the transmitted Gaussian beam captured by the receiver aperture.

    Written in the closed form with the waist eliminated:
    1 - exp(-2 S_s / (lambda^2/(pi phi^2) + pi phi^2 L^2)).
    """
    phi_sq = g.diffraction_angle**2
    denom = g.wavelength**2 / (math.pi * phi_sq) + math.pi * phi_sq * g.distance**2
    return -math.expm1(-2.0 * g.receiver_area / denom)


def link_loss_db(g):
    """Link loss in dB, 10 log10(delta); 0 dB means nothing is lost."""
    return 10.0 * np.log10(link_loss(g))
