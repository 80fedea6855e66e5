"""Command-line entry point: ``holomimo <subcommand> [options]``.

Exit codes: 0 success, 2 spec error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from .sweeps import (RUNNERS, SpecError, default_output, default_spec, emit, load_spec,
                     run_channel_sample, spec_to_ini)

log = logging.getLogger("holomimo")

EXIT_OK, EXIT_SPEC, EXIT_NUMERIC = 0, 2, 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", help="sweep spec file (INI); flags override its values")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, dest="n_trials")
    p.add_argument("--snr-db", type=float, dest="snr_db")
    p.add_argument("--out", dest="output", help="output path (default: $HOLOMIMO_OUTPUT_DIR/<kind>.<ext>)")
    p.add_argument("--format", choices=("csv", "svg-lines"))
    p.add_argument("--freq", type=float, nargs="+", dest="frequencies_hz", metavar="HZ")
    p.add_argument("--D", type=float, dest="D_m", metavar="METRES",
                   help="aperture side in metres (clears --D-wavelengths)")
    p.add_argument("--D-wavelengths", type=float, dest="D_wavelengths")
    p.add_argument("--ratio-db", type=float, dest="ratio_db", help="P_send/P_noise in dB")
    p.add_argument("--z", type=float, dest="z_m", help="fixed distance in metres")
    p.add_argument("--max-outer", type=int, dest="max_outer",
                   help="cap on evanescent harmonics per side (negative: no cap)")
    p.add_argument("--profile", choices=("uniform", "isotropic"))
    p.add_argument("--exact-c", action="store_true", help="use c = 299792458 m/s instead of 3e8")
    p.add_argument("--min", type=float, dest="axis_min")
    p.add_argument("--max", type=float, dest="axis_max")
    p.add_argument("--count", type=int, dest="axis_count")
    p.add_argument("--spacing", choices=("linear", "log"), dest="axis_spacing")
    p.add_argument("--dump-spec", action="store_true", help="print the resolved spec and exit")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holomimo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="kind", required=True)
    helps = {
        "dof-distance": "evanescent DoF gain vs distance",
        "dof-power": "evanescent DoF gain vs power ratio",
        "capacity-distance": "paired far/near capacity improvement vs distance",
        "lattice": "dump the wavenumber lattice (lx, ly, kx, ky, gamma, region)",
        "field-sample": "sample one field realization on a lambda/2 grid",
    }
    for kind, h in helps.items():
        p = sub.add_parser(kind, help=h)
        _add_common(p)
        if kind == "field-sample":
            p.add_argument("--channel", action="store_true",
                           help="dump the shifted angular channel (row, col, re, im) instead")
    return parser


def resolve_spec(args: argparse.Namespace):
    spec = load_spec(args.spec) if args.spec else default_spec(args.kind)
    if spec.kind != args.kind:
        raise SpecError(f"spec file is for {spec.kind}, not {args.kind}")
    over = {}
    for key in ("seed", "n_trials", "snr_db", "output", "format", "D_wavelengths",
                "ratio_db", "z_m", "profile"):
        v = getattr(args, key)
        if v is not None:
            over[key] = v
    if args.frequencies_hz:
        over["frequencies_hz"] = tuple(args.frequencies_hz)
    if args.D_m is not None:
        over["D_m"] = args.D_m
        over.setdefault("D_wavelengths", None)
    if args.max_outer is not None:
        over["max_outer"] = None if args.max_outer < 0 else args.max_outer
    if args.exact_c:
        over["speed_of_light"] = 299_792_458.0
    axis_over = {k[5:]: getattr(args, k) for k in ("axis_min", "axis_max", "axis_count", "axis_spacing")
                 if getattr(args, k) is not None}
    if axis_over:
        if spec.axis is None:
            raise SpecError(f"{spec.kind} has no sweep axis")
        over["axis"] = replace(spec.axis, **axis_over)
    return replace(spec, **over) if over else spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        spec = resolve_spec(args)
        if args.dump_spec:
            sys.stdout.write(spec_to_ini(spec))
            return EXIT_OK
        if spec.kind == "capacity-distance":
            rows = RUNNERS[spec.kind](spec, progress=lambda r: log.info(
                "f=%g z=%.4g improvement=%.3f%% +/- %.3f", r["f_hz"], r["z_m"],
                r["improvement_pct"], r["improvement_se"]))
        elif spec.kind == "field-sample" and args.channel:
            rows = run_channel_sample(spec)
        else:
            rows = RUNNERS[spec.kind](spec)
        path = spec.output or default_output(spec)
        emit(rows, path, spec.format)
        log.info("wrote %d rows to %s", len(rows), path)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (FloatingPointError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
