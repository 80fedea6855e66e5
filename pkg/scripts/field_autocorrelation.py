"""Empirical spatial autocorrelation of synthesized isotropic fields vs sin(kr)/(kr).

    python3 scripts/field_autocorrelation.py [--wavelengths 10] [--realizations 10000]
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from holomimo import (Aperture, Radiation, build_support, estimate_autocorrelation,
                      sample_ensemble, variance_profile)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--wavelengths", type=float, default=10.0)
    ap.add_argument("--realizations", type=int, default=10_000)
    ap.add_argument("--freq", type=float, default=3e9)
    ap.add_argument("--points", type=int, default=9, help="grid points at lambda/8 spacing")
    args = ap.parse_args()

    rad = Radiation(args.freq)
    lam, k = rad.wavelength, rad.kappa
    s = build_support(Aperture.square(args.wavelengths * lam), rad, 0.0)
    p = variance_profile(s, "isotropic")
    step = lam / 8
    pos = [(i * step, 0.0, 0.0) for i in range(args.points)]
    fields = sample_ensemble(s, p, pos, range(args.realizations))
    lags = [(i * step, 0.0, 0.0) for i in range(args.points - 1)]
    ac = estimate_autocorrelation(fields, lags)
    print(f"{'r/lambda':>9} {'estimate':>9} {'sinc':>9} {'SE':>7} {'z-score':>8}")
    for lag, v, se in zip(ac.lags, ac.values, ac.std_error):
        r = lag[0]
        ref = 1.0 if r == 0 else math.sin(k * r) / (k * r)
        z = (v.real - ref) / se if se > 0 else 0.0
        print(f"{r / lam:9.3f} {v.real:9.4f} {ref:9.4f} {se:7.4f} {z:8.2f}")
    print(f"{len(s)} harmonics, {ac.n_realizations} realizations; max |imag| "
          f"{np.max(np.abs(ac.values.imag)):.4f}")


if __name__ == "__main__":
    main()
