"""Curvature of coordinate-chart metrics by central finite differences.

Index conventions (0-based arrays):

* ``Gamma[k, i, j]`` is the Christoffel symbol of the second kind.
* ``Rm[d, c, a, b] = d_a Gamma^d_{bc} - d_b Gamma^d_{ac} + Gamma^d_{ae} Gamma^e_{bc}
  - Gamma^d_{be} Gamma^e_{ac}`` are the components of ``R(d_a, d_b) d_c``.
* ``Rcov[a, b, c, d] = g_{ce} Rm[e, d, a, b] = <R(d_a, d_b) d_d, d_c>``, so that
  ``Rcov[a, b, a, b]`` is the sectional curvature numerator (positive on spheres).

The orthonormal frame comes from Gram-Schmidt on the coordinate basis in index
order, i.e. ``E = L^{-T}`` for the Cholesky factor ``G = L L^T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .double_forms import DoubleForm, first_bianchi_residual
from .errors import ConfigError, MetricError

DEFAULT_STEP = 1e-3
# nested central differences reach two steps from the base point
CLEARANCE_STEPS = 2


@dataclass(frozen=True)
class ChartMetric:
    dim: int
    g_fn: Callable[[np.ndarray], np.ndarray]
    fd_step: float = DEFAULT_STEP
    domain: tuple[tuple[float, float], ...] | None = None
    name: str = "chart"

    def with_step(self, step: float) -> "ChartMetric":
        return ChartMetric(self.dim, self.g_fn, step, self.domain, self.name)

    def metric(self, x) -> np.ndarray:
        g = np.asarray(self.g_fn(np.asarray(x, dtype=float)), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise MetricError(f"{self.name}: metric has shape {g.shape}, expected {(self.dim,) * 2}")
        if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, np.abs(g).max())):
            raise MetricError(f"{self.name}: metric is not symmetric at {list(x)}")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise MetricError(f"{self.name}: metric is not positive definite at {list(x)}") from exc
        return g

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise MetricError(f"{self.name}: point has shape {x.shape}, expected ({self.dim},)")
        if self.domain is not None:
            pad = CLEARANCE_STEPS * self.fd_step
            for i, (lo, hi) in enumerate(self.domain):
                if not lo + pad <= x[i] <= hi - pad:
                    raise MetricError(
                        f"{self.name}: coordinate {i} = {x[i]} is within {pad} of the domain edge [{lo}, {hi}]")
        return x


def _partial(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float, dim: int) -> np.ndarray:
    """Central differences of an array-valued field; axis 0 of the result is the direction."""
    out = []
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = h
        out.append((fn(x + e) - fn(x - e)) / (2 * h))
    return np.stack(out)


def metric_derivative(metric: ChartMetric, x) -> np.ndarray:
    """``dg[a, i, j] = d_a g_ij``."""
    x = metric.check_point(x)
    return _partial(metric.metric, x, metric.fd_step, metric.dim)


def _christoffel_unchecked(metric: ChartMetric, x: np.ndarray) -> np.ndarray:
    g = metric.metric(x)
    dg = _partial(metric.metric, x, metric.fd_step, metric.dim)
    ginv = np.linalg.inv(g)
    # Koszul: Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    low = 0.5 * (np.einsum("ijl->ijl", dg) + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg))
    gam = np.einsum("kl,ijl->kij", ginv, low)
    return 0.5 * (gam + gam.transpose(0, 2, 1))


def christoffel(metric: ChartMetric, x) -> np.ndarray:
    """Christoffel symbols ``Gamma[k, i, j]``, symmetric in ``(i, j)``."""
    return _christoffel_unchecked(metric, metric.check_point(x))


def riemann_coordinates(metric: ChartMetric, x) -> tuple[np.ndarray, np.ndarray]:
    """``(Rm, Rcov)`` in coordinates, see the module docstring for index order."""
    x = metric.check_point(x)
    gam = _christoffel_unchecked(metric, x)
    dgam = _partial(lambda y: _christoffel_unchecked(metric, y), x, metric.fd_step, metric.dim)
    # dgam[a, d, b, c] = d_a Gamma^d_{bc}
    Rm = (np.einsum("adbc->dcab", dgam) - np.einsum("bdac->dcab", dgam)
          + np.einsum("dae,ebc->dcab", gam, gam) - np.einsum("dbe,eac->dcab", gam, gam))
    g = metric.metric(x)
    Rcov = np.einsum("ce,edab->abcd", g, Rm)
    return Rm, Rcov


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns are the Gram-Schmidt orthonormalisation of the coordinate basis."""
    L = np.linalg.cholesky(g)
    return np.linalg.inv(L).T


@dataclass(frozen=True)
class FramedCurvature:
    point: np.ndarray
    E: np.ndarray
    R_frame: DoubleForm
    tensor: np.ndarray = field(repr=False)

    @property
    def sectional(self) -> dict[tuple[int, int], float]:
        n = self.tensor.shape[0]
        return {(i + 1, j + 1): float(self.tensor[i, j, i, j])
                for i in range(n) for j in range(i + 1, n)}

    def operator_eigenvalues(self) -> np.ndarray:
        """Sorted eigenvalues of the curvature operator on 2-vectors; frame independent."""
        n = self.tensor.shape[0]
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        M = np.array([[self.tensor[i, j, k, l] for (k, l) in pairs] for (i, j) in pairs])
        return np.sort(np.linalg.eigvalsh(0.5 * (M + M.T)))


def curvature_frame(metric: ChartMetric, x) -> FramedCurvature:
    """Curvature ``R(e_i, e_j; e_k, e_l)`` in the Gram-Schmidt frame at ``x``."""
    x = metric.check_point(x)
    _, Rcov = riemann_coordinates(metric, x)
    E = orthonormal_frame(metric.metric(x))
    T = np.einsum("abcd,ai,bj,ck,dl->ijkl", Rcov, E, E, E, E)
    return FramedCurvature(x, E, DoubleForm.from_tensor4(T), T)


# --- structure equations ---------------------------------------------------

def _coframe(metric: ChartMetric, x: np.ndarray) -> np.ndarray:
    """``theta[i, a]``: coefficients of ``theta^i`` on ``dx^a``."""
    g = metric.metric(x)
    return orthonormal_frame(g).T @ g


def _frame(metric: ChartMetric, x: np.ndarray) -> np.ndarray:
    return orthonormal_frame(metric.metric(x))


def _connection(metric: ChartMetric, x: np.ndarray) -> np.ndarray:
    """``omega[i, j, a] = theta^i(nabla_{d_a} e_j)``."""
    h = metric.fd_step
    E = _frame(metric, x)
    dE = _partial(lambda y: _frame(metric, y), x, h, metric.dim)  # dE[a, c, j]
    gam = _christoffel_unchecked(metric, x)
    nab = dE + np.einsum("cab,bj->acj", gam, E)  # nab[a, c, j] = (nabla_a e_j)^c
    theta = _coframe(metric, x)
    return np.einsum("ic,acj->ija", theta, nab)


def _d(deriv: np.ndarray) -> np.ndarray:
    """Exterior derivative of 1-forms: ``d alpha(a, b) = d_a alpha_b - d_b alpha_a``.

    ``deriv[a, ..., b] = d_a alpha_b``; the result has the 2-form indices last.
    """
    moved = np.moveaxis(deriv, 0, -2)  # [..., a, b]
    return moved - np.swapaxes(moved, -1, -2)


def _wedge11(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """``(alpha ^ beta)(a, b)`` for 1-form coefficient vectors in the last axis."""
    return alpha[..., :, None] * beta[..., None, :] - alpha[..., None, :] * beta[..., :, None]


@dataclass(frozen=True)
class StructureResiduals:
    first_structure: float
    second_structure: float
    bianchi_forms: float
    bianchi_algebraic: float
    curvature_scale: float

    @property
    def bianchi_algebraic_relative(self) -> float:
        return self.bianchi_algebraic / max(self.curvature_scale, 1e-300)

    def max(self) -> float:
        return max(self.first_structure, self.second_structure, self.bianchi_forms)

    def as_dict(self) -> dict:
        return {"first_structure": self.first_structure, "second_structure": self.second_structure,
                "bianchi_forms": self.bianchi_forms, "bianchi_algebraic": self.bianchi_algebraic,
                "bianchi_algebraic_relative": self.bianchi_algebraic_relative}


def structure_residuals(metric: ChartMetric, x) -> StructureResiduals:
    """Max-abs residuals of both structure equations and both first-Bianchi forms at ``x``.

    ``d theta^i + omega_ij ^ theta^j``, ``d omega_ij - Omega_ij + omega_ik ^ omega_kj`` and
    ``Omega_ij ^ theta^j`` are evaluated on coordinate 2- and 3-planes.
    """
    x = metric.check_point(x)
    n, h = metric.dim, metric.fd_step
    theta = _coframe(metric, x)
    dtheta = _d(_partial(lambda y: _coframe(metric, y), x, h, n))  # [i, a, b]
    omega = _connection(metric, x)
    domega = _d(_partial(lambda y: _connection(metric, y), x, h, n))  # [i, j, a, b]

    _, Rcov = riemann_coordinates(metric, x)
    E = _frame(metric, x)
    Omega = np.einsum("abcd,ci,dj->ijab", Rcov, E, E)

    wt = np.einsum("ijab->iab", _wedge11(omega, theta[None, :, :]))
    first = np.abs(dtheta + wt).max()
    ww = np.einsum("ikjab->ijab", _wedge11(omega[:, :, None, :], omega[None, :, :, :]))
    second = np.abs(domega - Omega + ww).max()
    # (Omega_ij ^ theta^j)(a, b, c) = cyclic sum of Omega_ij(a, b) theta^j_c
    t3 = np.einsum("ijab,jc->iabc", Omega, theta)
    bianchi3 = t3 + np.einsum("iabc->ibca", t3) + np.einsum("iabc->icab", t3)
    fc = curvature_frame(metric, x)
    return StructureResiduals(float(first), float(second), float(np.abs(bianchi3).max()),
                              first_bianchi_residual(fc.R_frame), max(fc.R_frame.max_abs(), 1.0))


# --- built-in charts -------------------------------------------------------

def euclidean_chart(m: int = 2) -> ChartMetric:
    return ChartMetric(m, lambda x: np.eye(m), name=f"euclidean:m={m}")


def polar_flat() -> ChartMetric:
    return ChartMetric(2, lambda x: np.diag([1.0, x[0] ** 2]),
                       domain=((0.05, 50.0), (-50.0, 50.0)), name="polar-flat")


def spherical_flat() -> ChartMetric:
    def g(x):
        r, th = x[0], x[1]
        return np.diag([1.0, r ** 2, (r * math.sin(th)) ** 2])
    return ChartMetric(3, g, domain=((0.05, 50.0), (0.0, math.pi), (-50.0, 50.0)), name="spherical-flat")


def _warped_metric(m: int, f: Callable[[float], float]):
    def g(x):
        diag = [1.0]
        s = f(x[0]) ** 2
        diag.append(s)
        for k in range(1, m - 1):
            s *= math.sin(x[k]) ** 2
            diag.append(s)
        return np.diag(diag)
    return g


def _angular_domain(m: int):
    # hyperspherical angles theta_1..theta_{m-2} in (0, pi); the last is periodic
    return tuple([(0.0, math.pi)] * (m - 2) + [(-50.0, 50.0)])


def round_sphere(m: int = 2) -> ChartMetric:
    """Unit ``S^m`` in hyperspherical angles ``(theta_1, ..., theta_{m-1}, phi)``."""
    if m < 2:
        raise ConfigError("round-sphere needs m >= 2")
    return ChartMetric(m, _warped_metric(m, math.sin), domain=((0.0, math.pi),) + _angular_domain(m),
                       name=f"round-sphere:m={m}")


def stereo_sphere(m: int = 2) -> ChartMetric:
    """Unit ``S^m`` in stereographic coordinates: ``4 / (1 + |x|^2)^2`` times the identity."""
    return ChartMetric(m, lambda x: 4.0 / (1.0 + x @ x) ** 2 * np.eye(m), name=f"stereo-sphere:m={m}")


def hyperbolic(m: int = 2) -> ChartMetric:
    """Upper half-space model, ``|dx|^2 / x_m^2``, curvature -1."""
    dom = tuple([(-50.0, 50.0)] * (m - 1) + [(0.0, 50.0)])
    return ChartMetric(m, lambda x: np.eye(m) / x[-1] ** 2, domain=dom, name=f"hyperbolic:m={m}")


WARP_PROFILES: dict[str, tuple[Callable[[float], float], int, float]] = {
    "sin": (math.sin, 1, math.pi),
    "sinh": (math.sinh, -1, 50.0),
    "id": (lambda t: t, 0, 50.0),
}


def warped_chart(m: int, f: str | Callable[[float], float] = "sin", r_max: float = 50.0) -> ChartMetric:
    """``dt^2 + f(t)^2 g_{S^{m-1}}`` in coordinates ``(t, theta_1, ..., phi)``."""
    if isinstance(f, str):
        if f not in WARP_PROFILES:
            raise ConfigError(f"unknown warp profile {f!r}; choose from {sorted(WARP_PROFILES)}")
        fn, _, r_max = WARP_PROFILES[f]
        name = f"warped:f={f},m={m}"
    else:
        fn, name = f, f"warped:m={m}"
    if m < 2:
        raise ConfigError("warped chart needs m >= 2")
    return ChartMetric(m, _warped_metric(m, fn), domain=((0.0, r_max),) + _angular_domain(m), name=name)


def pullback(metric: ChartMetric, phi: Callable[[np.ndarray], np.ndarray],
             jac: Callable[[np.ndarray], np.ndarray], name: str | None = None,
             domain=None) -> ChartMetric:
    """Metric ``J^T g(phi(y)) J`` of the chart ``y -> phi(y)``."""
    def g(y):
        J = np.asarray(jac(y), dtype=float)
        return J.T @ metric.g_fn(np.asarray(phi(y), dtype=float)) @ J
    return ChartMetric(metric.dim, g, metric.fd_step, domain, name or f"pullback({metric.name})")


CHARTS: dict[str, Callable[..., ChartMetric]] = {
    "euclidean": euclidean_chart,
    "polar-flat": lambda: polar_flat(),
    "spherical-flat": lambda: spherical_flat(),
    "round-sphere": round_sphere,
    "stereo-sphere": stereo_sphere,
    "hyperbolic": hyperbolic,
    "warped": warped_chart,
}

# sectional curvature of each named chart, used as the closed-form oracle
CHART_CURVATURE = {"euclidean": 0, "polar-flat": 0, "spherical-flat": 0, "round-sphere": 1,
                   "stereo-sphere": 1, "hyperbolic": -1}


def build_chart(selector: str, fd_step: float = DEFAULT_STEP) -> ChartMetric:
    """``"round-sphere:m=3"``, ``"warped:f=sinh,m=4"``, ``"polar-flat"`` and so on."""
    from .geometry_models import parse_selector

    name, kw = parse_selector(selector)
    if name not in CHARTS:
        raise ConfigError(f"unknown chart {name!r}; charts: {', '.join(sorted(CHARTS))}")
    args = {}
    for key, value in kw.items():
        if key == "m":
            try:
                args["m"] = int(value)
            except ValueError as exc:
                raise ConfigError(f"m must be an integer, got {value!r}") from exc
        elif key == "f" and name == "warped":
            args["f"] = value
        else:
            raise ConfigError(f"unknown parameter {key!r} for chart {name}")
    try:
        chart = CHARTS[name](**args)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for chart {name}: {exc}") from exc
    return chart.with_step(fd_step)


def chart_curvature_constant(chart_selector: str) -> int:
    from .geometry_models import parse_selector

    name, kw = parse_selector(chart_selector)
    if name == "warped":
        return WARP_PROFILES[kw.get("f", "sin")][1]
    return CHART_CURVATURE[name]


def default_point(chart: ChartMetric) -> np.ndarray:
    """A generic interior point well inside the chart domain."""
    base = [1.2, 1.4, 1.3, 1.5, 1.1, 1.45, 1.35]
    x = np.array(base[: chart.dim])
    if chart.name.startswith(("stereo-sphere", "euclidean")):
        x = 0.3 * x
    return x


def fd_convergence(metric: ChartMetric, x: Sequence[float], exact: np.ndarray,
                   steps: Sequence[float] = (4e-3, 2e-3, 1e-3)) -> list[tuple[float, float]]:
    """``(step, max-abs error of the frame curvature tensor)`` for each step."""
    out = []
    for s in steps:
        fc = curvature_frame(metric.with_step(s), x)
        out.append((s, float(np.abs(fc.tensor - exact).max())))
    return out
