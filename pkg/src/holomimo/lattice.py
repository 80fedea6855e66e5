"""Wavenumber lattice of the Fourier plane-wave series.

A rectangular aperture of side lengths ``Lx``, ``Ly`` supports the 2D harmonics
``kx = 2*pi*lx/Lx``, ``ky = 2*pi*ly/Ly``.  Harmonics inside the disk of radius
``kappa`` propagate; those in the annulus ``kappa < |k| <= sqrt(kappa**2 + kz_max**2)``
are evanescent and decay along ``z``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

#: Round value of the speed of light, so that 3 GHz maps to exactly 0.1 m.
C_ROUND = 3.0e8
#: CODATA speed of light in vacuum.
C_EXACT = 299_792_458.0

# Relative slack on the disk/annulus boundary tests so that lattice points lying
# exactly on a circle (e.g. (6, 8) at L = 10 wavelengths) are not lost to rounding.
_BOUNDARY_RTOL = 1e-12


class EmptyInnerRegionError(ValueError):
    """Raised when a support contains no propagating harmonic."""


@dataclass(frozen=True)
class Aperture:
    """Rectangular aperture; ``Lz = 0`` denotes a planar array."""

    Lx: float
    Ly: float
    Lz: float = 0.0

    def __post_init__(self) -> None:
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError(f"aperture sides must be positive, got Lx={self.Lx}, Ly={self.Ly}")
        if self.Lz < 0:
            raise ValueError(f"Lz must be nonnegative, got {self.Lz}")

    @classmethod
    def square(cls, side: float, Lz: float = 0.0) -> "Aperture":
        return cls(side, side, Lz)

    @property
    def D(self) -> float:
        """Maximum linear dimension, taken as the longest side."""
        return max(self.Lx, self.Ly, self.Lz)


@dataclass(frozen=True)
class Radiation:
    """Monochromatic radiation at ``frequency`` Hz."""

    frequency: float
    speed_of_light: float = C_ROUND

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        if not self.speed_of_light > 0:
            raise ValueError("speed of light must be positive")

    @classmethod
    def from_wavelength(cls, wavelength: float, speed_of_light: float = C_ROUND) -> "Radiation":
        if not wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {wavelength}")
        return cls(speed_of_light / wavelength, speed_of_light)

    @property
    def wavelength(self) -> float:
        return self.speed_of_light / self.frequency

    @property
    def kappa(self) -> float:
        return 2.0 * math.pi / self.wavelength


class Region(enum.Enum):
    INNER = "inner"
    OUTER = "outer"


@dataclass(frozen=True)
class WavenumberPoint:
    lx: int
    ly: int
    kx: float
    ky: float
    gamma: complex
    region: Region


def gamma(kx, ky, kappa: float):
    """Longitudinal wavenumber ``sqrt(kappa**2 - kx**2 - ky**2)``.

    Real and nonnegative inside the disk, ``+1j * sqrt(kx**2 + ky**2 - kappa**2)``
    outside it, so that ``exp(1j * gamma * z)`` decays for ``z > 0``.
    Works elementwise on arrays; scalars in give a Python ``complex`` out.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    d = kappa**2 - np.square(kx) - np.square(ky)
    out = np.where(d >= 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))
    if np.ndim(out) == 0:
        return complex(out)
    return out


@dataclass(frozen=True, eq=False)
class SpectralSupport:
    """Set of lattice harmonics with their propagating/evanescent split.

    Points are held as parallel arrays in row-major ``(lx, ly)`` order.  ``dkx``
    and ``dky`` are the lattice spacings ``2*pi/Lx`` and ``2*pi/Ly``; ``kz_max``
    is the annulus truncation actually applied (it may be smaller than the one
    requested when an outer-mode cap is in force, see ``kz_requested``).
    """

    lx: np.ndarray
    ly: np.ndarray
    dkx: float
    dky: float
    kappa: float
    kz_max: float = 0.0
    kz_requested: float | None = None
    kx: np.ndarray = field(init=False, repr=False)
    ky: np.ndarray = field(init=False, repr=False)
    gamma: np.ndarray = field(init=False, repr=False)
    inner: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.dkx > 0 and self.dky > 0 and self.kappa > 0):
            raise ValueError("lattice spacings and kappa must be positive")
        if self.kz_max < 0:
            raise ValueError(f"kz_max must be nonnegative, got {self.kz_max}")
        lx = np.asarray(self.lx, dtype=np.int64).ravel()
        ly = np.asarray(self.ly, dtype=np.int64).ravel()
        if lx.shape != ly.shape:
            raise ValueError("lx and ly must have the same length")
        order = np.lexsort((ly, lx))
        lx, ly = lx[order], ly[order]
        kx = self.dkx * lx
        ky = self.dky * ly
        k2 = kx**2 + ky**2
        kap2 = self.kappa**2
        inner = k2 <= kap2 * (1 + _BOUNDARY_RTOL)
        t2 = kap2 + self.kz_max**2
        if np.any(k2 > t2 * (1 + _BOUNDARY_RTOL)):
            raise ValueError("support contains points beyond the annulus truncation")
        g = np.where(inner, np.sqrt(np.clip(kap2 - k2, 0.0, None)) + 0j,
                     1j * np.sqrt(np.clip(k2 - kap2, 0.0, None)))
        for name, value in (("lx", lx), ("ly", ly), ("kx", kx), ("ky", ky),
                            ("gamma", g), ("inner", inner)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        if self.kz_requested is None:
            object.__setattr__(self, "kz_max", float(self.kz_max))
            object.__setattr__(self, "kz_requested", float(self.kz_max))

    def __len__(self) -> int:
        return int(self.lx.size)

    @property
    def outer(self) -> np.ndarray:
        return ~self.inner

    @property
    def n_inner(self) -> int:
        return int(self.inner.sum())

    @property
    def n_outer(self) -> int:
        return len(self) - self.n_inner

    @property
    def t(self) -> float:
        """Radius of the outer ellipse, ``sqrt(kappa**2 + kz_max**2)``."""
        return math.hypot(self.kappa, self.kz_max)

    @property
    def points(self) -> list[WavenumberPoint]:
        return [
            WavenumberPoint(int(a), int(b), float(x), float(y), complex(g),
                            Region.INNER if i else Region.OUTER)
            for a, b, x, y, g, i in zip(self.lx, self.ly, self.kx, self.ky, self.gamma, self.inner)
        ]

    def subset(self, mask) -> "SpectralSupport":
        mask = np.asarray(mask, dtype=bool)
        return SpectralSupport(self.lx[mask], self.ly[mask], self.dkx, self.dky,
                               self.kappa, self.kz_max, self.kz_requested)

    def inner_only(self) -> "SpectralSupport":
        """The far-field support: same Inner points, annulus dropped."""
        return SpectralSupport(self.lx[self.inner], self.ly[self.inner], self.dkx, self.dky,
                               self.kappa, 0.0, 0.0)

    def rows(self) -> list[dict]:
        return [
            {"lx": int(a), "ly": int(b), "kx": float(x), "ky": float(y),
             "re_gamma": float(g.real), "im_gamma": float(g.imag),
             "region": "inner" if i else "outer"}
            for a, b, x, y, g, i in zip(self.lx, self.ly, self.kx, self.ky, self.gamma, self.inner)
        ]


def _disk_indices(dkx: float, dky: float, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """All integer (lx, ly) with (dkx*lx)**2 + (dky*ly)**2 <= radius**2."""
    r2 = radius**2 * (1 + _BOUNDARY_RTOL)
    nx = int(math.floor(radius / dkx * (1 + _BOUNDARY_RTOL)))
    lxs, lys = [], []
    for a in range(-nx, nx + 1):
        rem = r2 - (dkx * a) ** 2
        if rem < 0:
            continue
        ny = int(math.floor(math.sqrt(rem) / dky))
        # floor of a rounded sqrt can be off by one in either direction
        while (dky * (ny + 1)) ** 2 <= rem:
            ny += 1
        while ny >= 0 and (dky * ny) ** 2 > rem:
            ny -= 1
        if ny < 0:
            continue
        b = np.arange(-ny, ny + 1)
        lxs.append(np.full(b.size, a))
        lys.append(b)
    if not lxs:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(lxs), np.concatenate(lys)


def build_support(aperture: Aperture, radiation: Radiation, kz_max: float,
                  max_outer: int | None = None) -> SpectralSupport:
    """Enumerate the lattice harmonics with ``kx**2 + ky**2 <= kappa**2 + kz_max**2``.

    With ``max_outer`` set, the annulus is shrunk to the largest radius whose
    evanescent shell count does not exceed ``max_outer``; whole shells are kept
    so the support stays symmetric, and the least-attenuated modes are the ones
    retained.
    """
    if not kz_max >= 0:
        raise ValueError(f"kz_max must be nonnegative, got {kz_max}")
    if max_outer is not None and max_outer < 0:
        raise ValueError("max_outer must be nonnegative")
    kappa = radiation.kappa
    dkx = 2 * math.pi / aperture.Lx
    dky = 2 * math.pi / aperture.Ly
    t = math.hypot(kappa, kz_max)

    if max_outer is None:
        lx, ly = _disk_indices(dkx, dky, t)
        return SpectralSupport(lx, ly, dkx, dky, kappa, kz_max)

    # Enumerate only as far out as the cap can possibly reach.
    radius = t
    n_in_est = math.pi * kappa**2 / (dkx * dky)
    guess = math.sqrt((2 * (n_in_est + max_outer) + 16) * dkx * dky / math.pi + kappa**2)
    guess += 2 * max(dkx, dky)
    while True:
        radius = min(t, guess)
        lx, ly = _disk_indices(dkx, dky, radius)
        k2 = (dkx * lx) ** 2 + (dky * ly) ** 2
        outer = k2 > kappa**2 * (1 + _BOUNDARY_RTOL)
        if radius >= t or outer.sum() > max_outer:
            break
        guess *= 2

    vals = np.sort(k2[outer])
    if vals.size <= max_outer and radius >= t:
        return SpectralSupport(lx, ly, dkx, dky, kappa, kz_max)

    # shells: runs of equal |k|**2, allowing for rounding between e.g. (5,0) and (3,4)
    starts = np.r_[True, np.diff(vals) > vals[1:] * _BOUNDARY_RTOL]
    shell_top = vals[np.r_[starts[1:], True]]
    cum = np.cumsum(np.bincount(np.cumsum(starts) - 1))
    keep = cum <= max_outer
    if keep.any():
        k2_cut = float(shell_top[keep][-1])
        mask = ~outer | (k2 <= k2_cut * (1 + 0.1 * _BOUNDARY_RTOL))
    else:
        k2_cut = kappa**2
        mask = ~outer
    kz_eff = math.sqrt(max(k2_cut - kappa**2, 0.0))
    return SpectralSupport(lx[mask], ly[mask], dkx, dky, kappa, kz_eff, kz_max)


def count_summary(support: SpectralSupport) -> tuple[int, int, float]:
    """``(n_inner, n_outer, n_outer / n_inner)``."""
    n_in, n_out = support.n_inner, support.n_outer
    if n_in == 0:
        raise EmptyInnerRegionError("support has no propagating (inner) harmonics")
    return n_in, n_out, n_out / n_in


def count_lattice(aperture: Aperture, radiation: Radiation, kz_max: float) -> tuple[int, int]:
    """``(n_inner, n_outer)`` without materializing the point arrays."""
    if not kz_max >= 0:
        raise ValueError(f"kz_max must be nonnegative, got {kz_max}")
    dkx = 2 * math.pi / aperture.Lx
    dky = 2 * math.pi / aperture.Ly

    def count(radius: float) -> int:
        r2 = radius**2 * (1 + _BOUNDARY_RTOL)
        nx = int(math.floor(radius / dkx * (1 + _BOUNDARY_RTOL)))
        a = np.arange(-nx, nx + 1)
        rem = r2 - (dkx * a) ** 2
        rem = rem[rem >= 0]
        ny = np.floor(np.sqrt(rem) / dky).astype(np.int64)
        ny += (dky * (ny + 1)) ** 2 <= rem
        ny -= (dky * ny) ** 2 > rem
        return int(np.sum(2 * ny[ny >= 0] + 1))

    n_in = count(radiation.kappa)
    return n_in, count(math.hypot(radiation.kappa, kz_max)) - n_in
