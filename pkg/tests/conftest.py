import math

import pytest

from rbcom.beam import BeamGeometry
from rbcom.gain import GainMedium
from rbcom.link import ChannelPhysics

I_S = 1.2e7
ETA = 0.7
R0 = 3e-3


@pytest.fixture
def medium():
    return GainMedium(I_S, ETA, R0)


@pytest.fixture
def half_loss(medium):
    """delta = 0.5, alpha = 0.01, P_in = 200 W."""
    return ChannelPhysics(medium, 200.0, 0.01, 0.5)


@pytest.fixture
def geometry15():
    return BeamGeometry(1064e-9, 0.2e-3, 15.0, math.pi * R0**2)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
