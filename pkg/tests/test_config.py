import math

import pytest
from hypothesis import given, strategies as st

from rbcom.config import ConfigError, RunConfig, UNITS, config_keys, load_config, parse_config


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text("")
    cfg = load_config(p)
    assert cfg == RunConfig()
    assert cfg.wavelength == 1064e-9
    assert cfg.I_s == 1.2e7 and cfg.eta == 0.7 and cfg.B == 1e9
    assert cfg.N0 == -174.0 and cfg.P_r_max == 10.0
    assert cfg.receiver_area == pytest.approx(math.pi * 9e-6)
    assert cfg.p_r_max_watts == pytest.approx(0.01)
    assert cfg.sigma2 == pytest.approx(3.981e-21 * 1e9, rel=1e-3)


def test_rod_radius_override():
    cfg = parse_config("r0 = 5e-3\n")
    assert cfg.medium().cross_section == pytest.approx(7.854e-5, rel=1e-4)
    assert cfg.receiver_area == pytest.approx(7.854e-5, rel=1e-4)


def test_comments_and_spacing():
    cfg = parse_config("# header\n  L=20   # metres\n\nphi = 3e-4\nk1 = 200\n")
    assert (cfg.L, cfg.phi, cfg.k1) == (20.0, 3e-4, 200)
    assert isinstance(cfg.k1, int)


def test_explicit_receiver_area():
    cfg = parse_config("S_s = 1e-4")
    assert cfg.receiver_area == 1e-4
    assert cfg.geometry().receiver_area == 1e-4


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("eta = -0.7", "eta"),
        ("foo = 1", "foo"),
        ("L = 1\nL = 2", "duplicate"),
        ("L 15", "key = value"),
        ("L = abc", "L"),
        ("k1 = 2.5", "k1"),
        ("alpha = 1.0", "alpha"),
        ("phi = nan", "phi"),
    ],
)
def test_rejections_name_the_problem(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_every_key_documented():
    assert set(config_keys()) == set(UNITS)


def test_with_values_rejects_unknown():
    with pytest.raises(ConfigError):
        RunConfig().with_values(bogus=1)


@given(st.floats(0.5, 100.0), st.floats(1e-5, 1e-3))
def test_round_trip_through_text(L, phi):
    cfg = parse_config(f"L = {L!r}\nphi = {phi!r}\n")
    assert cfg.L == L and cfg.phi == phi
