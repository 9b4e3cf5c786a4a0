#!/usr/bin/env python3
"""Monte Carlo check of the tube coefficients against round spheres in Euclidean space.

For the unit S^n in R^{n+1} the predicted tube volume is
sum_k alpha_{n+1,n,k} * K_{2k}(S^n) * eps^{1+2k}, with K_{2k} the integrated
Lipschitz-Killing density. The script compares it with the exact volume of the
two-sided shell {1 - eps < |x| < 1 + eps} and with a Monte Carlo estimate.
"""
import argparse
import math

import numpy as np

from gbchern import combinat as cb
from gbchern.double_forms import make_metric_form, owedge
from gbchern.gauss_bonnet import lk_density


def predicted(n: int, eps: float) -> float:
    g = make_metric_form(n, exact=False)
    R = owedge(g, g) * 0.5
    vol = float(cb.sphere_volume(n))
    return sum(float(cb.tube_alpha(n + 1, n, k)) * lk_density(R, n, k) * vol * eps ** (1 + 2 * k)
               for k in range(n // 2 + 1))


def shell(n: int, eps: float) -> float:
    ball = float(cb.sphere_volume(n)) / (n + 1)
    return ball * ((1 + eps) ** (n + 1) - (1 - eps) ** (n + 1))


def monte_carlo(n: int, eps: float, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    half = 1 + eps
    pts = rng.uniform(-half, half, size=(samples, n + 1))
    r = np.linalg.norm(pts, axis=1)
    hit = np.abs(r - 1) < eps
    box = (2 * half) ** (n + 1)
    p = hit.mean()
    return box * p, box * math.sqrt(p * (1 - p) / samples)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=2_000_000)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"{'n':>2} {'predicted':>12} {'shell':>12} {'monte carlo':>20} {'shell/predicted':>16}")
    for n in (1, 2, 3, 4):
        pred, exact = predicted(n, args.eps), shell(n, args.eps)
        mc, se = monte_carlo(n, args.eps, args.samples, rng)
        print(f"{n:2d} {pred:12.6f} {exact:12.6f} {mc:12.6f} +- {se:6.4f} {exact / pred:16.6f}")


if __name__ == "__main__":
    main()
