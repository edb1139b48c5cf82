#!/usr/bin/env python3
"""Null calibration of the detection threshold.

Simulates null panels, estimates the type-I error (any reported change-point)
for each candidate critical value, and prints the smallest value meeting the
target level.  The curve can be written as CSV for plotting.

Example:
    python3 scripts/run_calibration.py --n-sequences 200 --length 2000 \
        --replications 200 --alpha 0.05 --output curve.csv
"""

import argparse
import sys
import time

import numpy as np

from sparselik import SLConfig, calibrate_null, find_critical, markov_envelope, write_curve


def parse_args() -> argparse.Namespace:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-sequences", type=int, default=200)
    ap.add_argument("--length", type=int, default=2000)
    ap.add_argument("--model", choices=["normal", "poisson"], default="normal")
    ap.add_argument("--poisson-rate", type=float, default=1.0)
    ap.add_argument("--grid", type=float, nargs="+", default=list(np.arange(3.0, 10.01, 0.5)))
    ap.add_argument("--replications", type=int, default=200)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output", default=None, help="write the curve CSV here")
    return ap.parse_args()


def main() -> int:
    args = parse_args()
    cfg = SLConfig(model=args.model, seed=args.seed)
    t0 = time.time()
    curve = calibrate_null(
        n_sequences=args.n_sequences,
        length=args.length,
        cfg=cfg,
        grid=args.grid,
        n_replications=args.replications,
        seed=args.seed,
        poisson_rate=args.poisson_rate,
    )
    envelope = markov_envelope(cfg.build_schedule(args.length), curve.critical_values)
    print(f"{'c':>6}  {'type1':>8}  {'monotone':>8}  {'stderr':>8}  {'envelope':>9}")
    for i, c in enumerate(curve.critical_values):
        print(
            f"{c:6.2f}  {curve.type1_raw[i]:8.4f}  {curve.type1_monotone[i]:8.4f}  "
            f"{curve.stderr[i]:8.4f}  {min(float(envelope[i]), 1.0):9.4f}"
        )
    try:
        critical = find_critical(curve, args.alpha)
        print(f"\nsmallest critical value with type-I error <= {args.alpha}: {critical}")
    except ValueError as exc:
        print(f"\n{exc}")
    print(f"[{time.time() - t0:.0f}s for {args.replications} replications]")
    if args.output:
        write_curve(curve, args.output)
        print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
