"""Tensor-product quadrature on intervals and round spheres.

Nodes come from :func:`numpy.polynomial.legendre.leggauss`. Sphere rules use
hyperspherical coordinates ``(theta_1, ..., theta_{d-1}, phi)`` with
``theta_i in [0, pi]`` weighted by ``sin^{d-i}`` and a periodic trapezoid rule in
``phi``. Every rule remembers a coarser sibling so that :func:`integrate` can
report the change between levels as an error estimate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

MAX_GL_NODES = 128
MAX_SPHERE_DIM = 5


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray  # shape (N, dim)
    weights: np.ndarray  # shape (N,)
    domain: str
    order: int
    level: int | None = None
    coarser: "QuadratureRule | None" = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.weights)

    @property
    def measure(self) -> float:
        return float(pairwise_sum(self.weights))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int


def pairwise_sum(values: np.ndarray) -> float:
    """Fixed-order pairwise tree sum, independent of how the terms were produced."""
    v = np.asarray(values, dtype=float)
    while len(v) > 1:
        if len(v) % 2:
            v = np.append(v, 0.0)
        v = v[0::2] + v[1::2]
    return float(v[0]) if len(v) else 0.0


def gauss_legendre(a: float, b: float, n_nodes: int) -> QuadratureRule:
    """Gauss-Legendre rule on ``[a, b]``, exact for polynomials of degree ``2n-1``."""
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if not 1 <= n_nodes <= MAX_GL_NODES:
        raise DomainError(f"n_nodes must be in [1, {MAX_GL_NODES}], got {n_nodes}")
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    half = 0.5 * (b - a)
    pts = (a + half * (x + 1.0)).reshape(-1, 1)
    return QuadratureRule(pts, half * w, f"[{a}, {b}]", 2 * n_nodes - 1)


def _sphere_rule_raw(d: int, n: int) -> QuadratureRule:
    axes, wts = [], []
    for i in range(1, d):
        x, w = np.polynomial.legendre.leggauss(n)
        t = 0.5 * math.pi * (x + 1.0)
        axes.append(t)
        wts.append(0.5 * math.pi * w * np.sin(t) ** (d - i))
    k = 2 * n
    axes.append(2.0 * math.pi * np.arange(k) / k)
    wts.append(np.full(k, 2.0 * math.pi / k))
    mesh = np.meshgrid(*axes, indexing="ij")
    wmesh = np.meshgrid(*wts, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    w = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    return QuadratureRule(pts, w, f"S^{d}", 2 * n - 1)


def sphere_rule(d: int, level: int = 3) -> QuadratureRule:
    """Product rule on the unit ``S^d`` with ``4*level`` Gauss nodes per polar angle."""
    if not 1 <= d <= MAX_SPHERE_DIM:
        raise DomainError(f"sphere_rule supports 1 <= d <= {MAX_SPHERE_DIM}, got {d}")
    if level < 1:
        raise DomainError("level must be >= 1")
    coarser = sphere_rule(d, level - 1) if level > 1 else None
    raw = _sphere_rule_raw(d, 4 * level)
    return QuadratureRule(raw.points, raw.weights, raw.domain, raw.order, level, coarser)


def sphere_point(angles) -> np.ndarray:
    """Embed hyperspherical angles ``(theta_1..theta_{d-1}, phi)`` into the unit sphere in R^{d+1}."""
    angles = np.asarray(angles, dtype=float)
    d = len(angles)
    x = np.empty(d + 1)
    s = 1.0
    for i in range(d - 1):
        x[i] = s * math.cos(angles[i])
        s *= math.sin(angles[i])
    x[d - 1] = s * math.cos(angles[-1])
    x[d] = s * math.sin(angles[-1])
    return x


def _evaluate(rule: QuadratureRule, f: Callable, workers: int | None) -> np.ndarray:
    pts = [tuple(p) if len(p) > 1 else float(p[0]) for p in rule.points]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(f, pts))
    else:
        vals = [f(p) for p in pts]
    vals = np.asarray(vals, dtype=float)
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"integrand is not finite at node {i} ({rule.points[i].tolist()})")
    return vals


def integrate(rule: QuadratureRule, f: Callable, workers: int | None = None,
              reference: QuadratureRule | None = None) -> IntegralResult:
    """Weighted sum of ``f`` over ``rule``.

    Multi-dimensional nodes are passed as tuples, 1D nodes as floats. The error
    estimate is ``|I(rule) - I(rule.coarser)|`` (or against ``reference``), and 0
    when no coarser rule exists.
    """
    vals = _evaluate(rule, f, workers)
    value = pairwise_sum(vals * rule.weights)
    evals = len(vals)
    other = reference if reference is not None else rule.coarser
    err = 0.0
    if other is not None:
        ov = _evaluate(other, f, workers)
        err = abs(value - pairwise_sum(ov * other.weights))
        evals += len(ov)
    return IntegralResult(value, err, evals)


def integrate_radial(f: Callable[[float], float], a: float, b: float, n_nodes: int = 32) -> IntegralResult:
    """1D Gauss-Legendre integral with the error taken against a half-size rule."""
    rule = gauss_legendre(a, b, n_nodes)
    ref = gauss_legendre(a, b, max(1, n_nodes // 2))
    return integrate(rule, f, reference=ref)
