"""Regenerate the DoF and capacity sweeps as CSV + SVG.

    python3 scripts/run_sweeps.py [--out results] [--trials 500] [--quick]

``--quick`` shrinks the capacity sweep (50 trials, 9 distances) for a smoke run.
"""

from __future__ import annotations

import argparse
import logging
import time
from dataclasses import replace
from pathlib import Path

from holomimo.sweeps import Axis, default_spec, emit, spec_to_ini, RUNNERS

log = logging.getLogger("run_sweeps")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results", type=Path)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    args.out.mkdir(parents=True, exist_ok=True)

    specs = [default_spec("dof-distance", seed=args.seed),
             default_spec("dof-power", seed=args.seed),
             default_spec("capacity-distance", seed=args.seed, n_trials=args.trials)]
    if args.quick:
        specs[2] = replace(specs[2], n_trials=min(args.trials, 50), axis=Axis(0.01, 1.0, 9, "log"))

    for spec in specs:
        t0 = time.time()
        rows = RUNNERS[spec.kind](spec)
        (args.out / f"{spec.kind}.ini").write_text(spec_to_ini(spec))
        emit(rows, args.out / f"{spec.kind}.csv")
        emit(rows, args.out / f"{spec.kind}.svg", "svg-lines")
        log.info("%s: %d rows in %.1f s", spec.kind, len(rows), time.time() - t0)


if __name__ == "__main__":
    main()
