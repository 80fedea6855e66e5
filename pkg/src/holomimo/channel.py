"""Random channel realizations in the wavenumber domain.

Conventions
-----------
* ``VarianceProfile.sigma2`` holds per-harmonic powers; the coupled matrix
  ``Sigma`` multiplies the white matrix ``W`` entrywise, so it is built from the
  amplitudes ``sqrt(sigma2)`` and ``|H_a[i, j]|**2`` has mean ``Sigma[i, j]**2``
  ``= sigma2_r[i] * sigma2_s[j]``.
* Evanescent harmonics carry unit power at the aperture plane; their decay is
  applied by :func:`apply_shift`.
* Random draws take an integer seed and are pure functions of (inputs, seed).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .lattice import Aperture, Radiation, SpectralSupport

UNIFORM = "uniform"
ISOTROPIC = "isotropic"
_MODELS = (UNIFORM, ISOTROPIC)

# Lower clamp on |gamma| for the midpoint fallback, relative to kappa.
GAMMA_CLAMP = 1e-6


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    support: SpectralSupport
    sigma2: np.ndarray
    model: str = UNIFORM
    n_fallback: int = 0

    def __post_init__(self) -> None:
        s = np.asarray(self.sigma2, dtype=float)
        if s.shape != (len(self.support),):
            raise ValueError(f"sigma2 has shape {s.shape}, support has {len(self.support)} points")
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise ValueError("variances must be finite and nonnegative")
        s.setflags(write=False)
        object.__setattr__(self, "sigma2", s)

    @property
    def amplitude(self) -> np.ndarray:
        return np.sqrt(self.sigma2)

    @property
    def inner_part(self) -> np.ndarray:
        """``Sigma_in``: variances with evanescent entries zeroed."""
        return np.where(self.support.inner, self.sigma2, 0.0)

    @property
    def outer_part(self) -> np.ndarray:
        return np.where(self.support.inner, 0.0, self.sigma2)

    def inner_only(self) -> "VarianceProfile":
        mask = self.support.inner
        return VarianceProfile(self.support.inner_only(), self.sigma2[mask], self.model, self.n_fallback)


def _inner_cell_integral(x0, x1, y0, y1, kappa):
    """Integral of 1/sqrt(kappa^2 - kx^2 - ky^2) over the cell intersected with the disk."""
    a0, a1 = max(x0, -kappa), min(x1, kappa)
    if a0 >= a1:
        return 0.0

    def f(x):
        a = math.sqrt(max(kappa**2 - x * x, 0.0))
        if a == 0.0:
            return math.pi if y0 <= 0.0 <= y1 else 0.0
        lo = min(max(y0 / a, -1.0), 1.0)
        hi = min(max(y1 / a, -1.0), 1.0)
        return math.asin(hi) - math.asin(lo)

    brk = [x for y in (y0, y1) if abs(y) < kappa for x in (-math.sqrt(kappa**2 - y * y),
                                                           math.sqrt(kappa**2 - y * y))]
    brk = sorted(x for x in brk if a0 < x < a1)
    val, _ = integrate.quad(f, a0, a1, points=brk or None, limit=200)
    return val


def _outer_cell_integral(x0, x1, y0, y1, kappa, t):
    """Integral of 1/sqrt(kx^2 + ky^2 - kappa^2) over the cell within kappa < |k| <= t."""
    a0, a1 = max(x0, -t), min(x1, t)
    if a0 >= a1:
        return 0.0

    def seg(lo, hi, d):
        # integral of 1/sqrt(y^2 - d) over [lo, hi], 0 <= lo, y^2 > d
        if hi <= lo:
            return 0.0
        g = lambda y: math.log(y + math.sqrt(max(y * y - d, 0.0)))
        return g(hi) - g(lo)

    def f(x):
        d = kappa**2 - x * x
        ymin = math.sqrt(max(d, 0.0))
        ymax = math.sqrt(max(t * t - x * x, 0.0))
        total = 0.0
        # y >= 0 part and mirrored y <= 0 part
        for lo, hi in ((max(y0, 0.0), y1), (max(-y1, 0.0), -y0)):
            lo, hi = max(lo, ymin), min(hi, ymax)
            if hi > lo:
                total += seg(lo, hi, d)
        return total

    brk = []
    for y in (y0, y1):
        for r in (kappa, t):
            if abs(y) < r:
                s = math.sqrt(r * r - y * y)
                brk += [-s, s]
    brk += [-kappa, kappa]
    brk = sorted(x for x in brk if a0 < x < a1)
    val, _ = integrate.quad(f, a0, a1, points=brk or None, limit=200)
    return val


def _region_integral(kx, ky, hx, hy, inner, kappa, t):
    box = (kx - hx, kx + hx, ky - hy, ky + hy)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        if inner:
            return _inner_cell_integral(*box, kappa)
        return _outer_cell_integral(*box, kappa, t)


def _isotropic_weights(support: SpectralSupport) -> tuple[np.ndarray, int]:
    kappa, t = support.kappa, support.t
    hx, hy = support.dkx / 2, support.dky / 2
    w = np.empty(len(support))
    n_fallback = 0
    for i, (kx, ky, g, inner) in enumerate(zip(support.kx, support.ky, support.gamma, support.inner)):
        try:
            w[i] = _region_integral(kx, ky, hx, hy, inner, kappa, t)
        except (integrate.IntegrationWarning, ValueError, ZeroDivisionError):
            n_fallback += 1
            w[i] = 4 * hx * hy / max(abs(g), GAMMA_CLAMP * kappa)

    # Parts of the disk (annulus) lying in cells centred outside it would be
    # lost; hand each such part to the nearest harmonic of the same region.
    diag = math.hypot(hx, hy)
    taken = set(zip(support.lx.tolist(), support.ly.tolist()))
    for inner, lo, hi in ((True, kappa - diag, kappa + diag), (False, kappa - diag, t + diag)):
        own = np.flatnonzero(support.inner == inner)
        if own.size == 0 or (not inner and support.kz_max == 0):
            continue
        nx, ny = int(hi / support.dkx) + 1, int(hi / support.dky) + 1
        for a in range(-nx, nx + 1):
            for b in range(-ny, ny + 1):
                if (a, b) in taken and bool(support.inner[_index(support, a, b)]) == inner:
                    continue
                kx, ky = a * support.dkx, b * support.dky
                r = math.hypot(kx, ky)
                if r < lo or r > hi:
                    continue
                try:
                    part = _region_integral(kx, ky, hx, hy, inner, kappa, t)
                except (integrate.IntegrationWarning, ValueError, ZeroDivisionError):
                    n_fallback += 1
                    continue
                if part > 0:
                    d = (support.kx[own] - kx) ** 2 + (support.ky[own] - ky) ** 2
                    w[own[np.argmin(d)]] += part
    return w, n_fallback


def _index(support: SpectralSupport, a: int, b: int) -> int:
    return int(np.flatnonzero((support.lx == a) & (support.ly == b))[0])


def variance_profile(support: SpectralSupport, model: str = UNIFORM) -> VarianceProfile:
    """Per-harmonic variances over ``support``.

    ``"uniform"`` gives every harmonic unit power.  ``"isotropic"`` weights each
    harmonic by the integral of ``1/|gamma|`` over its lattice cell clipped to
    its region (disk for propagating, annulus for evanescent), scaled so the
    propagating entries average to one.  Region area inside cells whose centre
    belongs elsewhere is credited to the nearest harmonic of that region, so the
    weights of a region add up to its full integral.
    """
    if len(support) == 0:
        raise ValueError("empty support")
    if model not in _MODELS:
        raise ValueError(f"unknown variance model {model!r}; expected one of {_MODELS}")
    if model == UNIFORM:
        return VarianceProfile(support, np.ones(len(support)), UNIFORM)
    w, n_fallback = _isotropic_weights(support)
    if support.n_inner:
        w = w / w[support.inner].mean()
    return VarianceProfile(support, w, ISOTROPIC, n_fallback)


@dataclass(frozen=True, eq=False)
class CoupledSigma:
    matrix: np.ndarray
    rank_structure: str
    rx_inner: np.ndarray
    tx_inner: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def couple_sigma(sr: VarianceProfile, ss: VarianceProfile) -> CoupledSigma:
    """``vec(S_rin) vec(S_sin)^T + vec(S_rout) vec(S_sout)^T`` on amplitudes.

    Propagating and evanescent harmonics do not couple across the link, so the
    cross blocks are exactly zero and the result has rank at most two.
    """
    ar, as_ = sr.amplitude, ss.amplitude
    ri, si = sr.support.inner, ss.support.inner
    sig_in = np.outer(np.where(ri, ar, 0.0), np.where(si, as_, 0.0))
    sig_out = np.outer(np.where(ri, 0.0, ar), np.where(si, 0.0, as_))
    structure = "rank1" if not (sig_out.any() and sig_in.any()) else "in_out_sum"
    return CoupledSigma(sig_in + sig_out, structure, ri.copy(), si.copy())


@dataclass(frozen=True, eq=False)
class AngularChannel:
    matrix: np.ndarray
    shifted: bool = False
    rz: float = 0.0
    sz: float = 0.0


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def block_streams(seed: int) -> list[np.random.Generator]:
    """Generators for the propagating, evanescent and cross blocks of ``W``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]


def draw_angular(sigma: CoupledSigma, seed: int) -> AngularChannel:
    """``H_a = Sigma * W`` with ``W`` i.i.d. CN(0, 1).

    The propagating block, the evanescent block and the cross blocks of ``W``
    come from separate child streams of ``seed`` (see :func:`block_streams`).
    Runs that share a seed thus share the propagating-block randomness even
    when their evanescent sets differ, which is what makes near/far
    comparisons paired.
    """
    ri, si = sigma.rx_inner, sigma.tx_inner
    streams = block_streams(seed)
    W = np.empty(sigma.shape, dtype=complex)
    W[np.ix_(ri, si)] = complex_gaussian(streams[0], (ri.sum(), si.sum()))
    W[np.ix_(~ri, ~si)] = complex_gaussian(streams[1], ((~ri).sum(), (~si).sum()))
    W[np.ix_(ri, ~si)] = complex_gaussian(streams[2], (ri.sum(), (~si).sum()))
    W[np.ix_(~ri, si)] = complex_gaussian(streams[2], ((~ri).sum(), si.sum()))
    return AngularChannel(sigma.matrix * W)


def shift_factors(g: np.ndarray, z: float, sign: int = 1) -> np.ndarray:
    return np.exp(sign * 1j * np.asarray(g) * z)


def apply_shift(h: AngularChannel, gr: Sequence[complex], gs: Sequence[complex],
                rz: float, sz: float = 0.0) -> AngularChannel:
    """``H~ = diag(exp(1j gr rz)) H_a diag(exp(-1j gs sz))``.

    Propagating harmonics pick up phases only; an evanescent receive harmonic
    with ``gamma = 1j * b`` is scaled by ``exp(-b * rz)``.
    """
    if rz < 0 or sz < 0:
        raise ValueError(f"plane offsets must be nonnegative, got rz={rz}, sz={sz}")
    m = h.matrix
    if rz == 0 and sz == 0:
        out = m.copy()
    else:
        out = shift_factors(gr, rz)[:, None] * m * shift_factors(gs, sz, -1)[None, :]
    return AngularChannel(out, True, rz, sz)


def half_wavelength_grid(aperture: Aperture, radiation: Radiation,
                         support: SpectralSupport | None = None, z: float = 0.0) -> np.ndarray:
    """Rectangular antenna grid with spacing at most lambda/2.

    When ``support`` is given the per-axis count is raised above the harmonic
    index span, which makes the sampled harmonics exactly orthogonal.
    """
    lam = radiation.wavelength
    nx = math.ceil(2 * aperture.Lx / lam - 1e-9)
    ny = math.ceil(2 * aperture.Ly / lam - 1e-9)
    if support is not None and len(support):
        nx = max(nx, int(np.ptp(support.lx)) + 1)
        ny = max(ny, int(np.ptp(support.ly)) + 1)
    xs = (np.arange(nx) - (nx - 1) / 2) * aperture.Lx / nx
    ys = (np.arange(ny) - (ny - 1) / 2) * aperture.Ly / ny
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel(), np.full(X.size, float(z))])


def harmonics_matrix(support: SpectralSupport, positions) -> np.ndarray:
    """``Phi[p, i] = exp(1j (kx_i x_p + ky_i y_p)) / sqrt(N)``."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if pos.shape[0] == 0:
        raise ValueError("empty position list")
    phase = np.outer(pos[:, 0], support.kx) + np.outer(pos[:, 1], support.ky)
    return np.exp(1j * phase) / math.sqrt(pos.shape[0])


def spatial_channel(h_tilde: AngularChannel, rx_support: SpectralSupport, tx_support: SpectralSupport,
                    rx_positions, tx_positions) -> np.ndarray:
    """Antenna-domain channel ``H = Phi_r H~ Phi_s^H``."""
    m = h_tilde.matrix
    if m.shape != (len(rx_support), len(tx_support)):
        raise ValueError("channel shape does not match the supports")
    phi_r = harmonics_matrix(rx_support, rx_positions)
    phi_s = harmonics_matrix(tx_support, tx_positions)
    return phi_r @ m @ phi_s.conj().T


@dataclass(frozen=True, eq=False)
class FieldGrid:
    positions: np.ndarray
    values: np.ndarray
    seed: int


def _field_normalization(profile: VarianceProfile) -> float:
    total = profile.sigma2[profile.support.inner].sum()
    if total <= 0:
        total = profile.sigma2.sum()
    return 1.0 / math.sqrt(total)


def _plane_waves(support: SpectralSupport, positions: np.ndarray, branch: int) -> np.ndarray:
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    if branch == 1 and np.any(positions[:, 2] < 0):
        raise ValueError("h+ branch is sampled at z >= 0")
    if branch == -1 and np.any(positions[:, 2] > 0):
        raise ValueError("h- branch is sampled at z <= 0")
    phase = (np.outer(positions[:, 0], support.kx) + np.outer(positions[:, 1], support.ky)
             + branch * np.outer(positions[:, 2], support.gamma))
    return np.exp(1j * phase)


def sample_ensemble(support: SpectralSupport, profile: VarianceProfile, positions,
                    seeds: Sequence[int], branch: int = 1) -> list[FieldGrid]:
    """One :class:`FieldGrid` per seed; see :func:`sample_field`."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if profile.support is not support and len(profile.support) != len(support):
        raise ValueError("profile does not match support")
    E = _plane_waves(support, pos, branch)
    amp = profile.amplitude * _field_normalization(profile)
    W = np.stack([complex_gaussian(np.random.default_rng(s), len(support)) for s in seeds])
    vals = (W * amp) @ E.T
    pos.setflags(write=False)
    return [FieldGrid(pos, v, int(s)) for v, s in zip(vals, seeds)]


def sample_field(support: SpectralSupport, profile: VarianceProfile, positions, seed: int,
                 branch: int = 1) -> FieldGrid:
    """One realization of the scalar field as a sum of weighted plane waves.

    ``h(p) = c * sum_i sqrt(sigma2_i) W_i exp(1j (kx_i x + ky_i y + branch * gamma_i z))``
    with ``W_i`` i.i.d. CN(0, 1) and ``c`` giving unit variance at ``z = 0``
    from the propagating harmonics.
    """
    return sample_ensemble(support, profile, positions, [seed], branch)[0]


@dataclass(frozen=True)
class Autocorrelation:
    lags: np.ndarray
    values: np.ndarray
    std_error: np.ndarray
    n_realizations: int


def _pair_indices(positions: np.ndarray, lag, decimals: int = 9) -> tuple[np.ndarray, np.ndarray]:
    keys = {tuple(np.round(p, decimals)): i for i, p in enumerate(positions)}
    src, dst = [], []
    for i, p in enumerate(positions):
        j = keys.get(tuple(np.round(p + lag, decimals)))
        if j is not None:
            src.append(i)
            dst.append(j)
    return np.array(src, dtype=int), np.array(dst, dtype=int)


def estimate_autocorrelation(fields: Sequence[FieldGrid], lags) -> Autocorrelation:
    """Sample ``E[h*(p) h(p + lag)] / E[|h(p)|**2]`` with delta-method errors.

    Each realization contributes its average over all grid pairs at the lag;
    standard errors are computed across realizations.
    """
    if len(fields) < 100:
        raise ValueError(f"need at least 100 realizations, got {len(fields)}")
    pos = fields[0].positions
    H = np.stack([f.values for f in fields])
    lags = np.atleast_2d(np.asarray(lags, dtype=float))
    den = np.mean(np.abs(H) ** 2, axis=1)
    d_bar = den.mean()
    n = H.shape[0]
    values = np.empty(len(lags), dtype=complex)
    se = np.empty(len(lags))
    for k, lag in enumerate(lags):
        src, dst = _pair_indices(pos, lag)
        if src.size == 0:
            raise ValueError(f"lag {tuple(lag)} is not representable on the grid")
        num = np.mean(H[:, src].conj() * H[:, dst], axis=1)
        r = num.mean() / d_bar
        resid = (num - r * den) / d_bar
        values[k] = r
        se[k] = math.sqrt(np.var(resid, ddof=1) / n)
    return Autocorrelation(lags, values, se, n)
