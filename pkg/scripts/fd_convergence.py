#!/usr/bin/env python3
"""Observed convergence order of the finite-difference curvature on the built-in charts."""
import argparse
import math

import numpy as np

from gbchern import metric_engine as me

CHARTS = ["round-sphere:m=2", "round-sphere:m=4", "stereo-sphere:m=3", "hyperbolic:m=3",
          "warped:f=sin,m=4", "warped:f=sinh,m=5", "polar-flat", "spherical-flat"]


def space_form_tensor(n: int, a: float) -> np.ndarray:
    T = np.zeros((n,) * 4)
    for i in range(n):
        for j in range(n):
            if i != j:
                T[i, j, i, j], T[i, j, j, i] = a, -a
    return T


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=float, nargs="+", default=[8e-3, 4e-3, 2e-3, 1e-3, 5e-4])
    ap.add_argument("charts", nargs="*", default=CHARTS)
    args = ap.parse_args()

    print(f"{'chart':22s} " + " ".join(f"{s:>10.1e}" for s in args.steps) + "   orders")
    for sel in args.charts:
        chart = me.build_chart(sel)
        exact = space_form_tensor(chart.dim, me.chart_curvature_constant(sel))
        errs = [e for _, e in me.fd_convergence(chart, me.default_point(chart), exact, args.steps)]
        orders = [math.log(errs[i] / errs[i + 1], args.steps[i] / args.steps[i + 1])
                  if errs[i + 1] > 0 else float("nan") for i in range(len(errs) - 1)]
        print(f"{sel:22s} " + " ".join(f"{e:10.2e}" for e in errs)
              + "   " + " ".join(f"{o:4.2f}" for o in orders))


if __name__ == "__main__":
    main()
