"""Rectangle holonomy against its curvature term over shrinking loop sizes.

    python scripts/holonomy_sweep.py --dim 4 --sizes 0.4 0.2 0.1 0.05 0.025
"""
import argparse

import numpy as np

from cstarlab import cone
from cstarlab.reports import observed_orders


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=2, choices=[2, 4])
    ap.add_argument("--sizes", type=float, nargs="+", default=[0.4, 0.2, 0.1, 0.05, 0.025])
    ap.add_argument("--seed", type=int, default=None, help="random frame instead of the default one")
    args = ap.parse_args()

    if args.seed is None:
        frame = cone.default_frame(args.dim)
    else:
        frame = cone.random_frame(np.random.default_rng(args.seed), args.dim)
    x = np.array([1.0, 0.6, 0.8, 0.0])
    y = np.array([1.0, 0.0, 0.6, -0.8])
    rows = cone.holonomy_sweep(frame, x, y, sorted(args.sizes, reverse=True))
    print(f"{'size':>8} {'|log u|':>12} {'|ts[g(x),g(y)]|':>16} {'defect':>12}")
    for r in rows:
        print(f"{r['loop_size']:8.4f} {r['log_norm']:12.4e} {r['leading_norm']:16.4e} {r['defect']:12.4e}")
    orders = observed_orders([1 / r["loop_size"] for r in rows], [r["defect"] for r in rows])
    print("defect orders:", " ".join(f"{o:.3f}" for o in orders))


if __name__ == "__main__":
    main()
