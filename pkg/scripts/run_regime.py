#!/usr/bin/env python3
"""Run one verification suite at a chosen budget and print its tables.

Examples:
    python scripts/run_regime.py t45
    python scripts/run_regime.py t49 --replicates 1000 --seed 7
    python scripts/run_regime.py t33 --N-ladder 50,200 --n-ladder 100,500
"""

import argparse
import json
import sys
import time
from dataclasses import replace

from inarlab.rng import RngStream
from inarlab.verification import SUITES, regime_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("suite", choices=sorted(SUITES))
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--N", type=int, default=None)
    ap.add_argument("--n", type=int, default=None)
    ap.add_argument("--replicates", type=int, default=None)
    ap.add_argument("--N-ladder", type=str, default=None)
    ap.add_argument("--n-ladder", type=str, default=None)
    ap.add_argument("--calibrate", action="store_true",
                    help="draw from the limit law instead of simulating the process")
    ap.add_argument("--distort", type=float, default=1.0)
    ap.add_argument("--json", action="store_true", help="dump the full report")
    args = ap.parse_args()

    budget = SUITES[args.suite].budget
    overrides = {}
    for key in ("N", "n", "replicates"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    for key in ("N_ladder", "n_ladder"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = tuple(int(x) for x in val.split(","))
    if overrides:
        budget = replace(budget, **overrides)

    t0 = time.time()
    rpt = regime_suite(
        args.suite,
        rng=RngStream(args.seed),
        mode="calibrate" if args.calibrate else "simulate",
        distort=args.distort,
        budget=budget,
    )
    dt = time.time() - t0
    if args.json:
        print(json.dumps(rpt.to_dict(), indent=2))
    else:
        print(f"suite {rpt.suite}: {rpt.description}")
        print(f"mode={rpt.mode} distort={rpt.distort} budget={rpt.budget}")
        for check in rpt.checks:
            d = check if isinstance(check, dict) else check.to_dict()
            kind = d.get("kind")
            if kind == "cov":
                print(f"  cov: max rel dev {d['max_rel_dev']:.4f} over {d['n_cells']} pairs, "
                      f"gate verdict {d['passed_gate']}, passed={d['passed']}")
            elif kind == "cf":
                print(f"  cf : max |dev| {d['max_abs_dev']:.4f} over {d['n_cells']} cells, "
                      f"passed={d['passed']}")
            elif kind == "ks_at_1":
                print(f"  ks : {d['statistic']:.4f} vs threshold {d['threshold']:.4f}, "
                      f"passed={d['passed']}")
            elif kind == "bridge_zero_at_1":
                print(f"  bridge zero at t=1: passed={d['passed']}")
            elif kind == "ladder":
                print(f"  ladder ({d.get('order', 'default')}): "
                      + ", ".join(f"(N={c['N']}, n={c['n']}, drift={c['drift_sigma']})"
                                  for c in d["cells"]))
            elif kind == "order":
                print(f"  order {d['order']}: "
                      + "; ".join(f"{c['kind']} passed={c['passed']}" for c in d["checks"]))
        for row in rpt.var_at_one:
            print(f"  var at t=1 ({row['order']}): {row['variance']:.4f}")
        print(f"{'PASS' if rpt.passed else 'FAIL'}"
              + (" (budget-limited: inconclusive)" if rpt.budget_limited else "")
              + f" in {dt:.1f}s")
    return 0 if rpt.passed else 2


if __name__ == "__main__":
    sys.exit(main())
