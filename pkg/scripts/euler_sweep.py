#!/usr/bin/env python3
"""Euler-characteristic estimates over a sweep of registered models, written as CSV."""
import argparse
import csv
import sys

from gbchern import gauss_bonnet as gb
from gbchern import geometry_models as gm

DEFAULT = ([f"sphere:m={m}" for m in (2, 4, 6, 8)]
           + [f"euclidean-ball:m={m}" for m in (2, 3, 4, 5, 6)]
           + [f"ball-cross-sphere:p={p},q={q}" for p, q in ((2, 1), (2, 3), (4, 1), (1, 2), (3, 2))]
           + [f"hyperbolic-ball:m={m},r={r}" for m in (2, 4, 6) for r in (0.5, 2.0)]
           + [f"spherical-cap:m={m},r={r}" for m in (2, 4, 6) for r in (0.5, 1.4)]
           + ["flat-torus:m=3", "flat-torus:m=4"])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("models", nargs="*", default=DEFAULT)
    ap.add_argument("--nodes", type=int, default=32, help="radial Gauss-Legendre nodes")
    args = ap.parse_args()

    writer = csv.DictWriter(sys.stdout, fieldnames=gb.GBReport.CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for sel in args.models:
        report = gb.euler_estimate(gm.build_model(sel), quad_nodes=args.nodes)
        writer.writerow(report.csv_row())


if __name__ == "__main__":
    main()
