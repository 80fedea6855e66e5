import pytest

from holomimo import Aperture, Radiation


@pytest.fixture
def rad3g():
    """Baseline carrier: 3 GHz with c = 3e8, so lambda = 0.1 m exactly."""
    return Radiation(3e9)


@pytest.fixture
def ap10(rad3g):
    return Aperture.square(10 * rad3g.wavelength)
