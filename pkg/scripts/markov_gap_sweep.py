#!/usr/bin/env python3
"""Sweep the non-Markov conditional-probability gap across mixing laws.

The randomized process loses the Markov property exactly when the thinning
coefficient is non-degenerate; this prints how the gap
P(X2=0 | X1=1, X0=0) - P(X2=0 | X1=1) grows with the spread of the mixing
law, alongside the regular-variation and tail-constant diagnostics.
"""

import argparse

import numpy as np

from inarlab.analytics import markov_gap, regvar_limit, tail_asymptotic
from inarlab.models import AtomsMixing, BetaMixing, RandomizedModel


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    args = ap.parse_args()

    print(f"lambda = {args.lam}")
    print("\nBeta mixing, a = 0: gap vs beta")
    print(f"{'beta':>6} {'p_cond2':>12} {'p_cond1':>12} {'gap':>12}")
    for beta in (-0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0):
        rpt = markov_gap(RandomizedModel(args.lam, BetaMixing(0.0, beta)))
        print(f"{beta:6.1f} {rpt.p_cond2:12.8f} {rpt.p_cond1:12.8f} {rpt.gap:12.8f}")

    print("\ntwo-atom mixing at {0.5-d, 0.5+d}: gap vs spread d")
    print(f"{'d':>6} {'gap':>12}")
    for d in (0.05, 0.1, 0.2, 0.3, 0.4):
        mix = AtomsMixing([0.5 - d, 0.5 + d], [0.5, 0.5])
        rpt = markov_gap(RandomizedModel(args.lam, mix))
        print(f"{d:6.2f} {rpt.gap:12.8f}")

    print("\nregular variation of the conditional covariance, Beta(a=0, beta=0.5)")
    ks = [1, 2, 5, 10, 20, 50, 100, 200, 500]
    vals, lim = regvar_limit(BetaMixing(0.0, 0.5), args.lam, ks)
    print(f"{'k':>6} {'k^b E(a^k/(1-a))':>18} {'limit':>10}")
    for k, v in zip(ks, vals):
        print(f"{k:6d} {v:18.6f} {lim:10.6f}")

    print("\ntail constant of lam(1+a)/(1-a)^2, Beta(a=0, beta=0.5)")
    xs = [10.0, 100.0, 1000.0, 10**4, 10**5]
    vals, lim = tail_asymptotic(BetaMixing(0.0, 0.5), args.lam, xs)
    print(f"{'x':>8} {'x^((1+b)/2) P(W>x)':>20} {'limit':>10}")
    for x, v in zip(xs, vals):
        print(f"{x:8.0f} {v:20.6f} {lim:10.6f}")


if __name__ == "__main__":
    main()
