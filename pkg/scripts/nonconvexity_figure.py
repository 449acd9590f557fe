"""Data for the cube-root non-convexity picture.

Writes the coefficient graphs of V1 = cbrt(x) + 1 and V2 = cbrt(x) - 1, their
integral curves, and the two branches leaving 0 under the midpoint field
cbrt(x), as CSV files.

    python scripts/nonconvexity_figure.py --out results/figure
"""
import argparse
from pathlib import Path

import numpy as np

from cstarlab import flows
from cstarlab.cli import csv_text
from cstarlab.suites import emit_field_graph, emit_integral_curves


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/figure")
    ap.add_argument("--t-max", type=float, default=2.0)
    ap.add_argument("--n-seeds", type=int, default=17)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    header, rows = emit_field_graph()
    (out / "field_graph.csv").write_text(csv_text(header, rows, "coefficients of V1 and V2"))

    seeds = np.linspace(-4.0, 4.0, args.n_seeds)
    header, rows = emit_integral_curves(seeds=seeds, t_max=args.t_max)
    (out / "integral_curves.csv").write_text(csv_text(header, rows, "integral curves of V1 and V2"))

    times, xs = flows.flow_curves(flows.v_mid, [1e-8, -1e-8], args.t_max, 81, step=1e-4)
    rows = [(t, xs[k, 0], xs[k, 1], flows.branch_endpoint(t) if t > 0 else 0.0) for k, t in enumerate(times)]
    (out / "midpoint_branches.csv").write_text(
        csv_text(["t", "x_plus", "x_minus", "closed_form"], rows, "two solutions of dx/dt = cbrt(x) from 0")
    )
    rep = flows.counterexample_nonuniqueness(1.0)
    print(f"t = 1: x+ = {rep.limit_plus:.6f}, x- = {rep.limit_minus:.6f}, closed form {rep.expected:.6f}")
    print(f"wrote {out}/field_graph.csv, integral_curves.csv, midpoint_branches.csv")


if __name__ == "__main__":
    main()
