"""Acceptance checks, one per criterion.

Run ``pytest tests/test_acceptance.py -s`` (or ``python3 tests/test_acceptance.py``)
to see one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from holomimo import (Aperture, LinkBudget, Radiation, Scenario, SpectralSupport, apply_shift,
                      build_support, count_lattice, couple_sigma, draw_angular,
                      ergodic_capacity, estimate_autocorrelation, evanescent_dof, gain_fraction,
                      kz_max, rayleigh_distance, sample_ensemble, variance_profile)
from holomimo.capacity import hermitian_eigvals
from holomimo.cli import main as cli_main
from holomimo.sweeps import default_spec, run_capacity_vs_distance, run_dof_vs_distance

BASE = dict(D=0.5, z=0.5, f=3e9, ratio_db=125.56)


def report(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    print(line)
    return line


# 1 ---------------------------------------------------------------------------

def check_gain_point():
    rad = Radiation(BASE["f"])
    rep = evanescent_dof(math.pi * BASE["D"] ** 2 / rad.wavelength**2,
                         LinkBudget(BASE["ratio_db"], BASE["z"]), rad)
    # independent oracle: (ln(10^12.556) / (2 z) / (2 pi / lambda))^2
    oracle = (12.556 * math.log(10) / (2 * 0.5) / (2 * math.pi / 0.1)) ** 2
    rel = abs(rep.gain_fraction - oracle) / oracle
    ok = rel <= 1e-6 and abs(rep.gain_fraction - 0.21172) <= 1e-5
    return ok, f"gain_fraction = {rep.gain_fraction:.8f} (oracle {oracle:.8f}, rel {rel:.1e}; printed 0.21172)"


# 2 ---------------------------------------------------------------------------

def check_thirty_percent_crossing():
    rad = Radiation(BASE["f"])
    db = brentq(lambda x: gain_fraction(LinkBudget(x, BASE["z"]), rad) - 0.30, 0.0, 400.0, xtol=1e-12)
    # oracle: invert the closed form, ratio_dB = 10/ln10 * 4 pi z sqrt(0.3) / lambda
    oracle = 10 / math.log(10) * 4 * math.pi * BASE["z"] * math.sqrt(0.3) / rad.wavelength
    ok = abs(db - 149.5) <= 0.1 and abs(db - oracle) < 1e-8
    return ok, f"30% crossing at {db:.4f} dB (closed-form inverse {oracle:.4f}; target 149.5 +/- 0.1)"


# 3 ---------------------------------------------------------------------------

def check_distance_shape():
    spec = default_spec("dof-distance")
    rows = run_dof_vs_distance(spec)
    g = np.array([r["gain_pct"] for r in rows])
    decreasing = bool(np.all(np.diff(g) < 0))
    rad = Radiation(BASE["f"])
    g05 = gain_fraction(LinkBudget(BASE["ratio_db"], 0.5), rad)
    g5 = gain_fraction(LinkBudget(BASE["ratio_db"], 5.0), rad)
    ratio = g5 / g05
    zr = rayleigh_distance(BASE["D"], rad)
    g_r = 100 * gain_fraction(LinkBudget(BASE["ratio_db"], zr), rad)
    ok = decreasing and abs(ratio - 0.01) <= 1e-6 * 0.01 and g_r < 0.25
    return ok, (f"strictly decreasing over {len(g)} points: {decreasing}; gain(5)/gain(0.5) = {ratio:.10f}; "
                f"gain at Rayleigh distance {zr:g} m = {g_r:.4f}%")


# 4 ---------------------------------------------------------------------------

def brute_inner_count(n_wavelengths):
    # integer points (a, b) with a^2 + b^2 <= n^2, by plain double loop
    r = int(n_wavelengths)
    return sum(1 for a in range(-r, r + 1) for b in range(-r, r + 1) if a * a + b * b <= r * r)


def check_lattice_continuum():
    rad = Radiation(BASE["f"])
    ap = Aperture.square(10 * rad.wavelength)
    brute = brute_inner_count(10)
    n_in, _ = count_lattice(ap, rad, 0.0)
    worst = 0.0
    for z in (0.5, 1.0, 2.0, 3.0, 5.0):
        for db in (60.0, 90.0, 110.0, 125.56, 140.0):
            budget = LinkBudget(db, z)
            ni, no = count_lattice(ap, rad, kz_max(budget))
            err = abs(no / ni - (kz_max(budget) / rad.kappa) ** 2)
            worst = max(worst, err * math.sqrt(ni) / 4)
    ok = brute == 317 and n_in == 317 and worst <= 1.0
    return ok, f"inner count {n_in} (brute force {brute}); worst |gain error| / (4/sqrt(n_inner)) = {worst:.3f}"


# 5 ---------------------------------------------------------------------------

def check_far_field_equivalence():
    rad = Radiation(BASE["f"])
    s = build_support(Aperture.square(10 * rad.wavelength), rad, 0.0)
    p = variance_profile(s)
    sig = couple_sigma(p, p)
    worst = 0.0
    for seed in range(100):
        ha = draw_angular(sig, seed)
        ht = apply_shift(ha, s.gamma, s.gamma, 0.37 + 0.01 * seed, 0.11)
        a = hermitian_eigvals(ha.matrix)
        b = hermitian_eigvals(ht.matrix)
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
    return worst <= 1e-9, f"max relative eigenvalue gap over 100 draws ({len(s)} modes) = {worst:.2e}"


# 6 ---------------------------------------------------------------------------

def check_capacity_oracle():
    rad = Radiation(BASE["f"])
    k = rad.kappa
    # four propagating harmonics on a lambda-periodic lattice
    s = SpectralSupport([0, 1, -1, 0], [0, 0, 0, 1], k, k, k)
    p = variance_profile(s)
    n, snr = 2000, 10.0
    est = ergodic_capacity(Scenario(p, p, snr, 0.25), n, 0)
    rng = np.random.default_rng(2024)
    vals = np.empty(n)
    for t in range(n):
        h = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / math.sqrt(2)
        vals[t] = np.linalg.slogdet(np.eye(4) + snr / 4 * h @ h.conj().T)[1] / math.log(2)
    ref, ref_se = vals.mean(), vals.std(ddof=1) / math.sqrt(n)
    se = math.hypot(est.std_error, ref_se)
    gap = abs(est.mean_bits - ref)
    return s.n_inner == 4 and gap <= 3 * se, (
        f"engine {est.mean_bits:.4f} +/- {est.std_error:.4f} bits vs brute force {ref:.4f} +/- {ref_se:.4f}"
        f" (gap {gap / se:.2f} sigma)")


# 7 ---------------------------------------------------------------------------

def check_capacity_sweep(rows=None):
    spec = default_spec("capacity-distance")
    t0 = time.time()
    rows = rows or run_capacity_vs_distance(spec)
    elapsed = time.time() - t0
    freqs = sorted({r["f_hz"] for r in rows})
    zs = sorted({r["z_m"] for r in rows})
    imp = {(r["f_hz"], r["z_m"]): (r["improvement_pct"], r["improvement_se"]) for r in rows}

    def apart(a, b):
        return 3 * math.hypot(a[1], b[1])

    nonneg = all(v[0] >= -3 * v[1] for v in imp.values())
    mono = all(imp[f, z1][0] <= imp[f, z0][0] + apart(imp[f, z0], imp[f, z1])
               for f in freqs for z0, z1 in zip(zs, zs[1:]))
    ordered = all(imp[f_hi, z][0] <= imp[f_lo, z][0] + apart(imp[f_lo, z], imp[f_hi, z])
                  for z in zs for f_lo, f_hi in zip(freqs, freqs[1:]))
    drop = all(imp[f, zs[0]][0] - imp[f, zs[-1]][0] >= apart(imp[f, zs[0]], imp[f, zs[-1]])
               for f in freqs)
    ok = (nonneg and mono and ordered and drop and spec.n_trials == 500
          and spec.snr_db == 10.0 and zs[0] == 0.01 and zs[-1] == 1.0)
    summary = ", ".join(f"{f / 1e9:g} GHz {imp[f, zs[0]][0]:.2f}%->{imp[f, zs[-1]][0]:.2f}%" for f in freqs)
    return ok, (f"(a) {nonneg} (b) {mono} (c) {ordered} (d) {drop}; {summary}; "
                f"{len(rows)} points x {spec.n_trials} trials in {elapsed:.0f} s")


# 8 ---------------------------------------------------------------------------

def check_field_statistics():
    rad = Radiation(BASE["f"])
    lam = rad.wavelength
    s = build_support(Aperture.square(10 * lam), rad, 0.0)
    p = variance_profile(s, "isotropic")
    positions = [(i * lam / 4, 0.0, 0.0) for i in range(5)]
    fields = sample_ensemble(s, p, positions, range(10_000))
    lags = [(0.0, 0.0, 0.0), (lam / 4, 0.0, 0.0), (lam / 2, 0.0, 0.0)]
    ac = estimate_autocorrelation(fields, lags)
    target = [1.0, 2 / math.pi, 0.0]
    parts = []
    ok = ac.n_realizations >= 10_000
    for lag, v, se, c in zip(("0", "lambda/4", "lambda/2"), ac.values, ac.std_error, target):
        dev = abs(v - c)
        ok &= dev <= 3 * se if se > 0 else dev < 1e-12
        parts.append(f"{lag}: {v.real:.4f}{v.imag:+.4f}j vs {c:.4f} (SE {se:.4f})")
    return bool(ok), "; ".join(parts)


# 9 ---------------------------------------------------------------------------

CLI_RUNS = [
    ["dof-distance"],
    ["dof-power"],
    ["capacity-distance", "--trials", "20", "--count", "4", "--D-wavelengths", "4"],
    ["lattice"],
    ["field-sample"],
    ["field-sample", "--channel", "--ratio-db", "60", "--z", "0.05", "--D-wavelengths", "2"],
]


def check_determinism(tmp_dir):
    same = []
    for i, args in enumerate(CLI_RUNS):
        outs = []
        for rep in range(2):
            path = tmp_dir / f"run{i}_{rep}.csv"
            code = cli_main(args + ["--seed", "7", "--out", str(path)])
            outs.append((code, path.read_bytes() if path.exists() else None))
        same.append(outs[0][0] == 0 and outs[0] == outs[1] and outs[0][1])
    return all(same), f"{sum(map(bool, same))}/{len(same)} CLI sweeps byte-identical on rerun"


# pytest entry points -----------------------------------------------------------

def _run(n, fn, *args):
    ok, detail = fn(*args)
    report(n, ok, detail)
    assert ok, detail


def test_criterion_1_gain_point():
    _run(1, check_gain_point)


def test_criterion_2_thirty_percent_crossing():
    _run(2, check_thirty_percent_crossing)


def test_criterion_3_distance_shape():
    _run(3, check_distance_shape)


def test_criterion_4_lattice_continuum():
    t0 = time.time()
    _run(4, check_lattice_continuum)
    assert time.time() - t0 < 1.0


def test_criterion_5_far_field_equivalence():
    _run(5, check_far_field_equivalence)


def test_criterion_6_capacity_oracle():
    _run(6, check_capacity_oracle)


@pytest.mark.slow
def test_criterion_7_capacity_sweep():
    t0 = time.time()
    _run(7, check_capacity_sweep)
    assert time.time() - t0 < 600


def test_criterion_8_field_statistics():
    _run(8, check_field_statistics)


def test_criterion_9_determinism(tmp_path):
    _run(9, check_determinism, tmp_path)


if __name__ == "__main__":
    import pathlib
    import tempfile

    checks = [check_gain_point, check_thirty_percent_crossing, check_distance_shape,
              check_lattice_continuum, check_far_field_equivalence, check_capacity_oracle,
              check_capacity_sweep, check_field_statistics]
    results = [report(i, *fn()) for i, fn in enumerate(checks, 1)]
    with tempfile.TemporaryDirectory() as d:
        results.append(report(9, *check_determinism(pathlib.Path(d))))
    raise SystemExit(0 if all(r.startswith("[PASS]") for r in results) else 1)
