"""Parameter sweeps, their config files and outputs."""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
import numpy as np

from . import __version__
from .capacity import Scenario, improvement, paired_capacity
from .channel import (apply_shift, couple_sigma, draw_angular, half_wavelength_grid,
                      sample_field, variance_profile)
from .dof import (BASELINE_D, BASELINE_DISTANCE, BASELINE_FREQUENCY, BASELINE_RATIO_DB, LinkBudget,
                  db_to_linear, gain_fraction, kz_max)
from .lattice import C_ROUND, Aperture, Radiation, build_support, count_lattice

KINDS = ("dof-distance", "dof-power", "capacity-distance", "lattice", "field-sample")
FORMATS = ("csv", "svg-lines")
OUTPUT_DIR_ENV = "HOLOMIMO_OUTPUT_DIR"

CAPACITY_FREQUENCIES = (3.0e8, 9.0e8, 3.0e9)
CAPACITY_D_WAVELENGTHS = 10.0

DOF_COLUMNS = ("f_hz", "z_m", "D_m", "ratio_db", "snr_db", "n_inner", "n_outer", "gain_pct",
               "seed", "version")
CAPACITY_COLUMNS = ("f_hz", "z_m", "D_m", "ratio_db", "snr_db", "n_inner", "n_outer",
                    "c_far", "c_far_se", "c_near", "c_near_se", "improvement_pct",
                    "improvement_se", "n_trials", "max_outer", "seed", "version")
LATTICE_COLUMNS = ("lx", "ly", "kx", "ky", "re_gamma", "im_gamma", "region")
FIELD_COLUMNS = ("x_m", "y_m", "z_m", "re", "im", "f_hz", "D_m", "profile", "seed", "version")
MATRIX_COLUMNS = ("row", "col", "re", "im")


class SpecError(ValueError):
    """Invalid sweep specification (CLI exit code 2)."""


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def __post_init__(self) -> None:
        if self.count < 2:
            raise SpecError(f"sweep needs at least 2 points, got {self.count}")
        if not self.min < self.max:
            raise SpecError(f"sweep needs min < max, got {self.min} >= {self.max}")
        if self.spacing not in ("linear", "log"):
            raise SpecError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and not self.min > 0:
            raise SpecError("log spacing needs min > 0")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Everything needed to regenerate one output file.

    ``D_m`` fixes the aperture side in metres; when ``D_wavelengths`` is set it
    takes precedence and the side becomes ``D_wavelengths * lambda`` for each
    frequency.
    """

    kind: str
    frequencies_hz: tuple[float, ...] = (BASELINE_FREQUENCY,)
    D_m: float = BASELINE_D
    D_wavelengths: float | None = None
    ratio_db: float = BASELINE_RATIO_DB
    z_m: float = BASELINE_DISTANCE
    axis: Axis | None = None
    seed: int = 0
    n_trials: int = 500
    snr_db: float = 10.0
    max_outer: int | None = 80
    profile: str = "uniform"
    speed_of_light: float = C_ROUND
    format: str = "csv"
    output: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SpecError(f"unknown sweep kind {self.kind!r}; expected one of {KINDS}")
        if self.format not in FORMATS:
            raise SpecError(f"unknown format {self.format!r}")
        if not self.frequencies_hz or any(not f > 0 for f in self.frequencies_hz):
            raise SpecError("frequencies must be positive")
        object.__setattr__(self, "frequencies_hz", tuple(float(f) for f in self.frequencies_hz))
        if not self.D_m > 0 or (self.D_wavelengths is not None and not self.D_wavelengths > 0):
            raise SpecError("aperture size must be positive")
        if not self.z_m > 0:
            raise SpecError("distance must be positive")
        if self.n_trials < 1:
            raise SpecError("n_trials must be >= 1")
        if self.max_outer is not None and self.max_outer < 0:
            raise SpecError("max_outer must be nonnegative")
        if self.profile not in ("uniform", "isotropic"):
            raise SpecError(f"unknown profile {self.profile!r}")
        if self.kind in ("dof-distance", "dof-power", "capacity-distance") and self.axis is None:
            raise SpecError(f"{self.kind} needs a sweep axis")

    def aperture_side(self, radiation: Radiation) -> float:
        if self.D_wavelengths is not None:
            return self.D_wavelengths * radiation.wavelength
        return self.D_m

    def radiation(self, f: float) -> Radiation:
        return Radiation(f, self.speed_of_light)

    @property
    def snr(self) -> float:
        return db_to_linear(self.snr_db)


def default_spec(kind: str, **overrides) -> SweepSpec:
    """Baseline link for the DoF sweeps; 10-wavelength apertures at three carriers for capacity."""
    if kind == "dof-distance":
        base = SweepSpec(kind, axis=Axis(0.05, 5.0, 21, "log"))
    elif kind == "dof-power":
        base = SweepSpec(kind, axis=Axis(0.0, 160.0, 33, "linear"))
    elif kind == "capacity-distance":
        base = SweepSpec(kind, frequencies_hz=CAPACITY_FREQUENCIES,
                         D_wavelengths=CAPACITY_D_WAVELENGTHS, axis=Axis(0.01, 1.0, 25, "log"))
    elif kind == "lattice":
        base = SweepSpec(kind, D_wavelengths=CAPACITY_D_WAVELENGTHS)
    elif kind == "field-sample":
        base = SweepSpec(kind, D_wavelengths=4.0, ratio_db=0.0, z_m=1.0, profile="isotropic")
    else:
        raise SpecError(f"unknown sweep kind {kind!r}")
    return replace(base, **overrides) if overrides else base


# --- config files -------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def spec_to_ini(spec: SweepSpec) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["sweep"] = {k: _fmt(getattr(spec, k))
                   for k in ("kind", "seed", "n_trials", "snr_db", "format", "output")}
    cp["fixed"] = {k: _fmt(getattr(spec, k))
                   for k in ("frequencies_hz", "D_m", "D_wavelengths", "ratio_db", "z_m",
                             "max_outer", "profile", "speed_of_light")}
    if spec.axis is not None:
        cp["axis"] = {k: _fmt(v) for k, v in asdict(spec.axis).items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


_CONVERTERS = {
    "seed": int, "n_trials": int, "max_outer": int,
    "snr_db": float, "D_m": float, "D_wavelengths": float, "ratio_db": float, "z_m": float,
    "speed_of_light": float,
    "frequencies_hz": lambda s: tuple(float(x) for x in s.split(",") if x.strip()),
}


def parse_spec(text: str) -> SweepSpec:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecError(f"cannot parse spec file: {exc}") from exc
    known = {f.name for f in fields(SweepSpec)} - {"axis"}
    values: dict = {}
    for section in ("sweep", "fixed"):
        if not cp.has_section(section):
            continue
        for key, raw in cp[section].items():
            if key not in known:
                raise SpecError(f"unknown key {key!r} in [{section}]")
            raw = raw.strip()
            if raw.lower() == "none":
                values[key] = None
                continue
            try:
                values[key] = _CONVERTERS.get(key, str)(raw)
            except ValueError as exc:
                raise SpecError(f"bad value for {key}: {raw!r}") from exc
    if "kind" not in values:
        raise SpecError("spec file needs [sweep] kind")
    if cp.has_section("axis"):
        a = cp["axis"]
        try:
            values["axis"] = Axis(float(a["min"]), float(a["max"]), int(a["count"]),
                                  a.get("spacing", "linear").strip())
        except KeyError as exc:
            raise SpecError(f"[axis] is missing {exc}") from exc
        except ValueError as exc:
            raise SpecError(f"bad [axis] value: {exc}") from exc
    kind = values.pop("kind")
    defaults = default_spec(kind)
    try:
        return replace(defaults, **values)
    except TypeError as exc:
        raise SpecError(str(exc)) from exc


def load_spec(path: str | os.PathLike) -> SweepSpec:
    return parse_spec(Path(path).read_text())


# --- sweeps -------------------------------------------------------------------

def _check_kind(spec: SweepSpec, kind: str) -> None:
    if spec.kind != kind:
        raise SpecError(f"expected a {kind} spec, got {spec.kind}")


def _dof_row(spec: SweepSpec, f: float, z: float, ratio_db: float) -> dict:
    rad = spec.radiation(f)
    side = spec.aperture_side(rad)
    budget = LinkBudget(ratio_db, z)
    n_in, n_out = count_lattice(Aperture.square(side), rad, kz_max(budget))
    return {"f_hz": f, "z_m": float(z), "D_m": side, "ratio_db": float(ratio_db),
            "snr_db": spec.snr_db, "n_inner": n_in, "n_outer": n_out,
            "gain_pct": 100.0 * gain_fraction(budget, rad),
            "seed": spec.seed, "version": __version__}


def run_dof_vs_distance(spec: SweepSpec) -> list[dict]:
    """Evanescent DoF gain (percent) against transmission distance."""
    _check_kind(spec, "dof-distance")
    return [_dof_row(spec, f, z, spec.ratio_db)
            for f in spec.frequencies_hz for z in spec.axis.values()]


def run_dof_vs_power(spec: SweepSpec) -> list[dict]:
    """Evanescent DoF gain (percent) against the transmit-to-noise ratio in dB."""
    _check_kind(spec, "dof-power")
    return [_dof_row(spec, f, spec.z_m, db)
            for f in spec.frequencies_hz for db in spec.axis.values()]


def capacity_scenario(spec: SweepSpec, f: float, z: float, kz: float | None = None) -> Scenario:
    rad = spec.radiation(f)
    ap = Aperture.square(spec.aperture_side(rad))
    if kz is None:
        budget = LinkBudget(spec.ratio_db, z)
        if budget.below_noise:
            raise SpecError("capacity sweep needs a power ratio of at least 0 dB")
        kz = kz_max(budget)
    support = build_support(ap, rad, kz, max_outer=spec.max_outer)
    prof = variance_profile(support, spec.profile)
    return Scenario(prof, prof, spec.snr, z)


def run_capacity_vs_distance(spec: SweepSpec, progress=None) -> list[dict]:
    """Paired far/near ergodic capacity against distance, one series per frequency.

    The far-field draws do not depend on ``z`` (the shift is a pure phase on
    propagating harmonics), so they are computed once per frequency and reused.
    """
    _check_kind(spec, "capacity-distance")
    rows = []
    for f in spec.frequencies_hz:
        far_samples = None
        for z in spec.axis.values():
            sc = capacity_scenario(spec, f, float(z))
            far, near = paired_capacity(sc, spec.n_trials, spec.seed, far_samples)
            far_samples = far.samples
            imp = improvement(near, far)
            sup = sc.rx.support
            rows.append({
                "f_hz": f, "z_m": float(z), "D_m": spec.aperture_side(spec.radiation(f)),
                "ratio_db": spec.ratio_db, "snr_db": spec.snr_db,
                "n_inner": sup.n_inner, "n_outer": sup.n_outer,
                "c_far": far.mean_bits, "c_far_se": far.std_error,
                "c_near": near.mean_bits, "c_near_se": near.std_error,
                "improvement_pct": imp.percent, "improvement_se": imp.std_error,
                "n_trials": spec.n_trials, "max_outer": spec.max_outer,
                "seed": spec.seed, "version": __version__,
            })
            if progress is not None:
                progress(rows[-1])
    return rows


def _support_for(spec: SweepSpec):
    rad = spec.radiation(spec.frequencies_hz[0])
    ap = Aperture.square(spec.aperture_side(rad))
    budget = LinkBudget(spec.ratio_db, spec.z_m)
    return rad, ap, build_support(ap, rad, kz_max(budget), max_outer=spec.max_outer)


def run_lattice(spec: SweepSpec) -> list[dict]:
    """One row per lattice harmonic of the first frequency's support."""
    _check_kind(spec, "lattice")
    return _support_for(spec)[2].rows()


def run_field_sample(spec: SweepSpec) -> list[dict]:
    """One field realization on a lambda/2 grid at ``z = 0``."""
    _check_kind(spec, "field-sample")
    rad, ap, support = _support_for(spec)
    prof = variance_profile(support, spec.profile)
    grid = half_wavelength_grid(ap, rad, support)
    fg = sample_field(support, prof, grid, spec.seed)
    return [{"x_m": float(p[0]), "y_m": float(p[1]), "z_m": float(p[2]),
             "re": float(v.real), "im": float(v.imag), "f_hz": rad.frequency,
             "D_m": ap.Lx, "profile": spec.profile, "seed": spec.seed, "version": __version__}
            for p, v in zip(fg.positions, fg.values)]


def run_channel_sample(spec: SweepSpec) -> list[dict]:
    """One shifted angular channel ``H~`` at distance ``z_m`` as (row, col, re, im)."""
    _check_kind(spec, "field-sample")
    sc = capacity_scenario(spec, spec.frequencies_hz[0], spec.z_m)
    sigma = couple_sigma(sc.rx, sc.tx)
    ht = apply_shift(draw_angular(sigma, spec.seed), sc.rx.support.gamma, sc.tx.support.gamma, sc.rz)
    m = ht.matrix
    return [{"row": i, "col": j, "re": float(m[i, j].real), "im": float(m[i, j].imag)}
            for i in range(m.shape[0]) for j in range(m.shape[1])]


RUNNERS = {
    "dof-distance": run_dof_vs_distance,
    "dof-power": run_dof_vs_power,
    "capacity-distance": run_capacity_vs_distance,
    "lattice": run_lattice,
    "field-sample": run_field_sample,
}


# --- output -------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(rows[0].keys()))
    for r in rows:
        w.writerow([_cell(v) for v in r.values()])
    return buf.getvalue()


def read_csv(path: str | os.PathLike) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _plot_hints(rows: list[dict]) -> tuple[str, str, str | None, bool]:
    keys = rows[0].keys()
    if "improvement_pct" in keys:
        return "z_m", "improvement_pct", "f_hz", True
    if "gain_pct" in keys:
        zs = {r["z_m"] for r in rows}
        if len(zs) > 1:
            return "z_m", "gain_pct", "f_hz", True
        return "ratio_db", "gain_pct", "f_hz", False
    if "re_gamma" in keys:
        return "kx", "ky", "region", False
    return list(keys)[0], list(keys)[1], None, False


def rows_to_svg(rows: list[dict], x: str, y: str, series: str | None = None,
                logx: bool = False, width: int = 640, height: int = 420) -> str:
    """Static line chart: one polyline per series, labelled axes."""
    groups: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        key = _cell(r[series]) if series else y
        groups.setdefault(key, []).append((float(r[x]), float(r[y])))
    xs = np.array([p[0] for g in groups.values() for p in g])
    ys = np.array([p[1] for g in groups.values() for p in g])
    if logx:
        if np.any(xs <= 0):
            logx = False
        else:
            xs = np.log10(xs)
    left, right, top, bottom = 70, 20, 20, 50
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(min(ys.min(), 0.0)), float(ys.max())
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(v):
        v = math.log10(v) if logx else v
        return left + (v - x0) / (x1 - x0) * (width - left - right)

    def py(v):
        return height - bottom - (v - y0) / (y1 - y0) * (height - top - bottom)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
           f'<text x="{(left + width - right) / 2:.1f}" y="{height - 12}" text-anchor="middle" '
           f'font-size="13">{x}{" (log)" if logx else ""}</text>',
           f'<text x="16" y="{(top + height - bottom) / 2:.1f}" text-anchor="middle" font-size="13" '
           f'transform="rotate(-90 16 {(top + height - bottom) / 2:.1f})">{y}</text>']
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        xl = 10**xv if logx else xv
        out.append(f'<text x="{px(xl):.1f}" y="{height - bottom + 16}" text-anchor="middle" '
                   f'font-size="11">{xl:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{py(yv) + 4:.1f}" text-anchor="end" '
                   f'font-size="11">{yv:.3g}</text>')
    for i, (name, pts) in enumerate(groups.items()):
        c = colors[i % len(colors)]
        coords = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in sorted(pts))
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{coords}"/>')
        out.append(f'<text x="{width - right - 4}" y="{top + 14 * (i + 1)}" text-anchor="end" '
                   f'font-size="11" fill="{c}">{series or y}={name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(rows: list[dict], path: str | os.PathLike, fmt: str = "csv", **plot) -> Path:
    """Write ``rows`` as CSV or as a static SVG line chart.

    Nothing is written when ``rows`` is empty.
    """
    if not rows:
        raise ValueError("no rows to emit")
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "svg-lines":
        x, y, series, logx = _plot_hints(rows)
        text = rows_to_svg(rows, plot.get("x", x), plot.get("y", y), plot.get("series", series),
                           plot.get("logx", logx))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def default_output(spec: SweepSpec) -> Path:
    ext = "csv" if spec.format == "csv" else "svg"
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{spec.kind}.{ext}"
