"""Closed-form degrees of freedom, far field and evanescent gain."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lattice import Aperture, Radiation

#: Baseline link: 0.5 m aperture at 3 GHz, 0.5 m apart, transmit-to-noise ratio in dB.
BASELINE_RATIO_DB = 125.56
BASELINE_DISTANCE = 0.5
BASELINE_FREQUENCY = 3.0e9
BASELINE_D = 0.5


class RegimeError(ValueError):
    """Inputs outside the regime in which a formula holds."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit-to-noise power ratio (dB, 10*log10), distance and SNR."""

    power_ratio_db: float
    distance_z: float
    snr: float = 10.0

    def __post_init__(self) -> None:
        if not self.distance_z > 0:
            raise ValueError(f"distance_z must be positive, got {self.distance_z}")
        if not self.snr >= 0:
            raise ValueError(f"snr must be nonnegative, got {self.snr}")
        if not math.isfinite(self.power_ratio_db):
            raise ValueError("power_ratio_db must be finite")

    @property
    def power_ratio_linear(self) -> float:
        return db_to_linear(self.power_ratio_db)

    @property
    def log_ratio(self) -> float:
        """Natural log of the linear power ratio, without overflow for large dB."""
        return self.power_ratio_db * math.log(10.0) / 10.0

    @property
    def below_noise(self) -> bool:
        return self.power_ratio_db < 0


@dataclass(frozen=True)
class DofReport:
    dof_far_field: float
    kz_max: float
    gain_fraction: float
    dof_evanescent: float
    dof_total: float
    below_noise: bool = False

    @property
    def gain_percent(self) -> float:
        return 100.0 * self.gain_fraction


def dof_planar(aperture: Aperture, radiation: Radiation) -> float:
    """``pi * Lx * Ly / lambda**2``; ``Lz`` is ignored."""
    return math.pi * aperture.Lx * aperture.Ly / radiation.wavelength**2


def dof_volumetric(aperture: Aperture, radiation: Radiation) -> float:
    """``2 * pi * Lx * Ly / lambda**2`` for a slab with ``0 < Lz < min(Lx, Ly)``.

    The factor two is the rank of the forward/backward pair
    ``[exp(1j*g*z), exp(-1j*g*z)]``; the result does not grow with ``Lz``.
    """
    if not aperture.Lz > 0:
        raise RegimeError("volumetric DoF needs Lz > 0")
    if aperture.Lz >= min(aperture.Lx, aperture.Ly):
        raise RegimeError(
            f"volumetric DoF assumes Lz < min(Lx, Ly); got Lz={aperture.Lz}, "
            f"Lx={aperture.Lx}, Ly={aperture.Ly}"
        )
    return 2.0 * dof_planar(aperture, radiation)


def rayleigh_distance(D: float, radiation: Radiation) -> float:
    if not D > 0:
        raise ValueError(f"D must be positive, got {D}")
    return 2.0 * D**2 / radiation.wavelength


def kz_max(budget: LinkBudget) -> float:
    """Deepest usable evanescent decay rate, ``ln(P_send/P_noise) / (2 z)``.

    A mode with imaginary wavenumber ``kz`` loses ``exp(-2 kz z)`` in power over
    ``z``; at this rate the received power just reaches the noise floor.  Budgets
    below 0 dB give 0 (check ``budget.below_noise``).
    """
    if budget.below_noise:
        return 0.0
    return budget.log_ratio / (2.0 * budget.distance_z)


def gain_fraction(budget: LinkBudget, radiation: Radiation) -> float:
    """``lambda**2 * ln(ratio)**2 / (4 pi z)**2``, zero below the noise floor."""
    if budget.below_noise:
        return 0.0
    lam = radiation.wavelength
    return lam**2 * budget.log_ratio**2 / (4.0 * math.pi * budget.distance_z) ** 2


def evanescent_dof(dof_far_field: float, budget: LinkBudget, radiation: Radiation) -> DofReport:
    if not dof_far_field > 0:
        raise ValueError(f"dof_far_field must be positive, got {dof_far_field}")
    g = gain_fraction(budget, radiation)
    return DofReport(
        dof_far_field=dof_far_field,
        kz_max=kz_max(budget),
        gain_fraction=g,
        dof_evanescent=dof_far_field * g,
        dof_total=dof_far_field * (1.0 + g),
        below_noise=budget.below_noise,
    )


def ratio_db_for_gain(target: float, distance_z: float, radiation: Radiation) -> float:
    """Power ratio (dB) at which the evanescent gain fraction reaches ``target``.

    Found by bracketing root search on :func:`gain_fraction`, so it exercises the
    same closed form the sweeps use.
    """
    from scipy.optimize import brentq

    if not target > 0:
        raise ValueError("target gain must be positive")

    def f(db: float) -> float:
        return gain_fraction(LinkBudget(db, distance_z), radiation) - target

    hi = 10.0
    while f(hi) < 0:
        hi *= 2
        if hi > 1e6:
            raise RegimeError("target gain not reachable")
    return brentq(f, 0.0, hi, xtol=1e-10)
