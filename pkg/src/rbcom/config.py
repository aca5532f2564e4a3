"""Run configuration: a flat ``key = value`` document with strict keys.

Lines are ``key = value``; ``#`` starts a comment. Absent keys take the
reference values below. Noise density and the photodetector cap are in
dBm (per Hz for ``N0``); everything else is SI.
"""

from dataclasses import dataclass, fields, replace
import math

from rbcom.beam import BeamGeometry
from rbcom.gain import GainMedium
from rbcom.link import ChannelPhysics
from rbcom.optimizer import OptimizerConfig
from rbcom.units import dbm_to_watts


class ConfigError(ValueError):
    pass


# key -> unit label used in CSV headers and messages
UNITS = {
    "wavelength": "m",
    "phi": "rad",
    "L": "m",
    "r0": "m",
    "I_s": "W/m^2",
    "eta": "1",
    "P_in": "W",
    "B": "Hz",
    "N0": "dBm/Hz",
    "P_r_max": "dBm",
    "S_s": "m^2",
    "alpha": "1",
    "k1": "count",
    "k2": "count",
    "seed": "int",
    "frames": "count",
    "slots": "count",
}
_INT_KEYS = {"k1", "k2", "seed", "frames", "slots"}


@dataclass(frozen=True)
class RunConfig:
    wavelength: float = 1064e-9
    phi: float = 0.2e-3
    L: float = 15.0
    r0: float = 3e-3
    I_s: float = 1.2e7
    eta: float = 0.7
    P_in: float = 200.0
    B: float = 1e9
    N0: float = -174.0
    P_r_max: float = 10.0
    S_s: float | None = None  # receiver area; None means equal to the rod cross-section
    alpha: float = 0.01  # only used by stable-power
    k1: int = 1000
    k2: int = 1000
    seed: int = 0
    frames: int = 1000
    slots: int = 8

    def __post_init__(self):
        checks = [
            (self.wavelength > 0, "wavelength must be > 0"),
            (self.phi > 0, "phi (diffraction angle) must be > 0"),
            (self.L >= 0, "L (link distance) must be >= 0"),
            (self.r0 > 0, "r0 (rod radius) must be > 0"),
            (self.I_s > 0, "I_s (saturation intensity) must be > 0"),
            (0 < self.eta <= 1, "eta (pump efficiency) must lie in (0, 1]"),
            (self.P_in >= 0, "P_in (pump power) must be >= 0"),
            (self.B > 0, "B (bandwidth) must be > 0"),
            (math.isfinite(self.N0), "N0 must be finite"),
            (math.isfinite(self.P_r_max), "P_r_max must be finite"),
            (self.S_s is None or self.S_s > 0, "S_s (receiver area) must be > 0"),
            (0 < self.alpha < 1, "alpha (splitting ratio) must lie in (0, 1)"),
            (self.k1 >= 2 and self.k2 >= 2, "grid counts k1, k2 must be >= 2"),
            (self.frames >= 1 and self.slots >= 1, "frames and slots must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def receiver_area(self):
        return self.S_s if self.S_s is not None else math.pi * self.r0**2

    @property
    def sigma2(self):
        """Noise power N0 * B in watts."""
        return dbm_to_watts(self.N0) * self.B

    @property
    def p_r_max_watts(self):
        return float(dbm_to_watts(self.P_r_max))

    def medium(self):
        return GainMedium(self.I_s, self.eta, self.r0)

    def geometry(self):
        return BeamGeometry(self.wavelength, self.phi, self.L, self.receiver_area)

    def physics(self, delta, alpha=None):
        return ChannelPhysics(self.medium(), self.P_in, self.alpha if alpha is None else alpha, delta)

    def optimizer_config(self):
        return OptimizerConfig(
            self.medium(), self.geometry(), self.P_in, self.sigma2, self.p_r_max_watts, self.k1, self.k2
        )

    def with_values(self, **changes):
        try:
            return replace(self, **{k: _coerce(k, v) for k, v in changes.items()})
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _coerce(key, value):
    if key not in UNITS:
        raise ConfigError(f"unknown configuration key {key!r}")
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key!r}: {value!r}") from None


def parse_config(text):
    """Parse a key-value document into a RunConfig (strict keys)."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in UNITS:
            raise ConfigError(f"line {lineno}: unknown configuration key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _coerce(key, value)
    return RunConfig(**values)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_keys():
    return [f.name for f in fields(RunConfig)]
