"""Mesh refinement for the ordered-exponential formula and the commutator integral.

    python scripts/convergence_study.py --ns 128 256 512 1024 2048 4096
"""
import argparse

import numpy as np

from cstarlab import algebra as alg
from cstarlab import ordered


def table(title, ns, res, orders):
    print(title)
    print(f"{'n':>6} {'residual':>12} {'order':>7}")
    for k, (n, r) in enumerate(zip(ns, res)):
        o = f"{orders[k - 1]:7.3f}" if k else " " * 7
        print(f"{n:6d} {r:12.4e} {o}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", type=int, nargs="+", default=[128, 256, 512, 1024, 2048, 4096])
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=None, help="random 3x3 generators instead of i sigma3, i sigma1")
    args = ap.parse_args()

    if args.seed is None:
        h, g = 1j * alg.SIGMA_3, 1j * alg.SIGMA_1
    else:
        rng = np.random.default_rng(args.seed)
        h, g = alg.random_skew(rng, 3, norm=1.0), alg.random_skew(rng, 3, norm=1.0)
    res, orders = ordered.tilde_convergence(h, g, args.t, args.ns)
    table("gauge formula, higher semigroup parameter on the right", args.ns, res, orders)
    rev = [ordered.verify_tilde_formula(h, g, args.t, n).reversed_residual for n in args.ns[-2:]]
    print(f"reversed ordering residual: {rev[-1]:.4e} (does not shrink: {rev[0]:.4e} -> {rev[1]:.4e})\n")
    res, orders = ordered.commutator_lemma_convergence(h, g, args.t, args.ns)
    table("commutator integral, midpoint quadrature", args.ns, res, orders)


if __name__ == "__main__":
    main()
