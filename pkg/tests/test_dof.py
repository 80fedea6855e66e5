import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from holomimo import (Aperture, LinkBudget, Radiation, RegimeError, dof_planar, dof_volumetric,
                      evanescent_dof, gain_fraction, kz_max, rayleigh_distance, ratio_db_for_gain)

# ln(10**12.556) / (2 * 0.5), evaluated independently with math.log
KZ_BASELINE = 28.911258427633236
# (KZ_BASELINE / (2 pi / 0.1))**2
GAIN_BASELINE = 0.2117260302188849


def test_dof_planar():
    r = Radiation.from_wavelength(0.1)
    assert dof_planar(Aperture.square(1.0), r) == pytest.approx(100 * math.pi)
    assert dof_planar(Aperture.square(0.1), r) == pytest.approx(math.pi)
    half = Radiation.from_wavelength(0.05)
    assert dof_planar(Aperture.square(1.0), half) == pytest.approx(4 * dof_planar(Aperture.square(1.0), r))


def test_dof_volumetric():
    r = Radiation.from_wavelength(0.1)
    assert dof_volumetric(Aperture(1.0, 1.0, 0.2), r) == pytest.approx(628.3185307)
    assert dof_volumetric(Aperture(1.0, 1.0, 0.1), r) == dof_volumetric(Aperture(1.0, 1.0, 0.3), r)
    with pytest.raises(RegimeError):
        dof_volumetric(Aperture(1.0, 1.0, 1.0), r)
    with pytest.raises(RegimeError):
        dof_volumetric(Aperture(1.0, 1.0, 0.0), r)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.001, 1), st.floats(1e8, 1e11))
def test_volumetric_is_twice_planar(Lx, Ly, frac, f):
    ap = Aperture(Lx, Ly, frac * min(Lx, Ly) * 0.999)
    r = Radiation(f)
    assert dof_volumetric(ap, r) == 2 * dof_planar(ap, r)


def test_rayleigh_distance():
    assert rayleigh_distance(1.0, Radiation(5e9)) == pytest.approx(33.3, abs=0.05)
    assert rayleigh_distance(0.5, Radiation.from_wavelength(0.1)) == pytest.approx(5.0)
    r = Radiation(3e9)
    assert rayleigh_distance(2.0, r) == pytest.approx(4 * rayleigh_distance(1.0, r))
    with pytest.raises(ValueError):
        rayleigh_distance(0.0, r)


def test_kz_max():
    assert kz_max(LinkBudget(125.56, 0.5)) == pytest.approx(KZ_BASELINE, rel=1e-12)
    assert kz_max(LinkBudget(0.0, 3.0)) == 0.0
    assert kz_max(LinkBudget(80.0, 2.0)) == pytest.approx(kz_max(LinkBudget(80.0, 1.0)) / 2)


def test_below_noise_budget():
    b = LinkBudget(-3.0, 1.0)
    assert b.below_noise and kz_max(b) == 0.0
    rep = evanescent_dof(10.0, b, Radiation(3e9))
    assert rep.gain_fraction == 0 and rep.below_noise


def test_evanescent_dof_baseline():
    r = Radiation(3e9)
    rep = evanescent_dof(100.0, LinkBudget(125.56, 0.5), r)
    assert rep.gain_fraction == pytest.approx(GAIN_BASELINE, rel=1e-9)
    assert rep.gain_fraction == pytest.approx(0.21172, abs=1e-5)
    assert rep.dof_evanescent == pytest.approx(100 * rep.gain_fraction)
    assert rep.dof_total == pytest.approx(100 + rep.dof_evanescent)
    far = evanescent_dof(100.0, LinkBudget(125.56, 5.0), r).gain_fraction
    assert far == pytest.approx(0.0021, abs=5e-5)
    assert evanescent_dof(1.0, LinkBudget(0.0, 0.5), r).gain_fraction == 0


@given(st.floats(0.1, 200), st.floats(1e-3, 100), st.floats(1e8, 1e11))
def test_closed_forms_agree(db, z, f):
    r = Radiation(f)
    b = LinkBudget(db, z)
    assert gain_fraction(b, r) == pytest.approx((kz_max(b) / r.kappa) ** 2, rel=1e-12)


@given(st.floats(1, 200), st.floats(1e-2, 50), st.floats(1.01, 10))
def test_monotonicity(db, z, factor):
    r = Radiation(3e9)
    g = gain_fraction(LinkBudget(db, z), r)
    assert gain_fraction(LinkBudget(db, z * factor), r) < g
    assert gain_fraction(LinkBudget(db + factor, z), r) > g


def test_vanishes_far_away():
    r = Radiation(3e9)
    gs = [gain_fraction(LinkBudget(125.56, z), r) for z in (1, 10, 100, 1e4)]
    assert gs[-1] < 1e-8 and gs == sorted(gs, reverse=True)


def test_thirty_percent_crossing():
    db = ratio_db_for_gain(0.30, 0.5, Radiation(3e9))
    assert db == pytest.approx(149.46, abs=0.01)
