"""Closed-form model geometries with frame-constant curvature.

Every model works in an orthonormal frame adapted to the boundary: on the
boundary, ``e_1..e_{m-1}`` are tangent and ``e_m`` is the outer normal, so the
ambient curvature restricted to the boundary is plain index filtering. The
second fundamental form uses the outer-normal convention (``h = +g`` on the
unit sphere bounding the unit ball).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .combinat import PiRational, sphere_volume
from .double_forms import DoubleForm, make_metric_form, owedge
from .errors import ConfigError, DomainError

Scalar = Any  # Fraction, PiRational or float depending on mode


@dataclass(frozen=True)
class RadialProfile:
    """Warping function ``f`` of ``dt^2 + f(t)^2 g_0`` with the constant curvature it produces."""

    name: str
    f: Callable[[float], float]
    df: Callable[[float], float]
    curvature: int


PROFILES = {
    "t": RadialProfile("t", lambda t: t, lambda t: 1.0, 0),
    "sin": RadialProfile("sin", math.sin, math.cos, 1),
    "sinh": RadialProfile("sinh", math.sinh, math.cosh, -1),
}


@dataclass(frozen=True)
class BoundaryData:
    h: DoubleForm
    Rbar: DoubleForm
    gbar: DoubleForm
    volume: Scalar

    @property
    def dims(self) -> int:
        return self.h.dims


@dataclass(frozen=True)
class ModelGeometry:
    name: str
    m: int
    curvature: DoubleForm
    volume: Scalar | None
    euler_char: int
    boundary: BoundaryData | None = None
    exact: bool = True
    radial: tuple[RadialProfile, float] | None = None
    params: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def curvature_at(self, point=None) -> DoubleForm:
        # all models here are homogeneous or radially symmetric in an adapted frame
        return self.curvature

    def boundary_restricted_curvature(self) -> DoubleForm:
        """Ambient curvature on boundary tangent directions ``e_1..e_{m-1}``."""
        if self.boundary is None:
            raise DomainError(f"model {self.name} has no boundary")
        return self.curvature.restrict(self.m - 1)

    def gauss_residual(self) -> DoubleForm:
        """``R|boundary - (Rbar - h(x)h/2)``; zero when the boundary data are consistent."""
        b = self._need_boundary()
        half = Fraction(1, 2) if self.exact else 0.5
        return self.boundary_restricted_curvature() - (b.Rbar - owedge(b.h, b.h) * half)

    def _need_boundary(self) -> BoundaryData:
        if self.boundary is None:
            raise DomainError(f"model {self.name} has no boundary")
        return self.boundary


def _num(x, exact: bool):
    if exact:
        if isinstance(x, float):
            raise DomainError("float parameter in exact mode")
        return Fraction(x)
    return float(x)


def _vol(x: PiRational, exact: bool):
    return x if exact else float(x)


def space_form_curvature(m: int, a, exact: bool = True) -> DoubleForm:
    """``R = (a/2) g(x)g``."""
    g = make_metric_form(m, exact)
    a = _num(a, exact)
    return owedge(g, g) * (a / 2)


def space_form(m: int, a=1, exact: bool = True) -> ModelGeometry:
    """Closed manifold of constant curvature ``a``: a round sphere for ``a > 0``, a flat torus for ``a = 0``."""
    if m < 2:
        raise DomainError("space_form needs m >= 2")
    a = _num(a, exact)
    if a < 0:
        raise DomainError("closed hyperbolic space forms carry no closed-form volume here")
    R = space_form_curvature(m, a, exact)
    if a == 0:
        return ModelGeometry(f"flat-torus:m={m}", m, R, _num(1, exact), 0, exact=exact,
                             params={"m": m, "a": a})
    if m % 2 and exact and a != 1:
        raise DomainError("exact odd-dimensional spheres need a = 1")
    if m % 2 == 0 or exact:
        vol = sphere_volume(m) / (a ** (m // 2))
    else:
        vol = float(sphere_volume(m)) / a ** (m / 2)
    return ModelGeometry(f"sphere:m={m}", m, R, vol, 1 + (-1) ** m, exact=exact,
                         params={"m": m, "a": a})


def flat_torus(m: int, exact: bool = True) -> ModelGeometry:
    return space_form(m, 0, exact)


def sphere_boundary(n: int, f_r, df_r, radius_volume, exact: bool) -> BoundaryData:
    """Round ``S^n`` of radius ``f(r)`` with second fundamental form ``(f'/f) g``."""
    gbar = make_metric_form(n, exact)
    h = gbar * (df_r / f_r)
    half = Fraction(1, 2) if exact else 0.5
    Rbar = owedge(gbar, gbar) * (half / (f_r * f_r)) if n >= 2 else DoubleForm.zero(n, (2, 2), exact)
    return BoundaryData(h, Rbar, gbar, radius_volume)


def warped_product(m: int, profile: str, r, exact: bool = True) -> ModelGeometry:
    """Geodesic ball of radius ``r`` in ``dt^2 + f(t)^2 g_{S^{m-1}}``, ``f`` in {t, sin, sinh}."""
    if m < 2:
        raise DomainError("warped_product needs m >= 2")
    if profile not in PROFILES:
        raise DomainError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    prof = PROFILES[profile]
    if exact and profile != "t":
        raise DomainError(f"profile {profile} is transcendental; use float mode")
    r = _num(r, exact)
    if r <= 0:
        raise DomainError("radius must be positive")
    if profile == "t":
        f_r, df_r = r, _num(1, exact)
    else:
        f_r, df_r = prof.f(r), prof.df(r)
    if f_r <= 0:
        raise DomainError(f"profile {profile} is not positive at r={r}")
    svol = sphere_volume(m - 1)
    bvol = svol * (f_r ** (m - 1)) if exact else float(svol) * f_r ** (m - 1)
    boundary = sphere_boundary(m - 1, f_r, df_r, bvol, exact)
    R = space_form_curvature(m, prof.curvature, exact)
    if profile == "t":
        ivol = svol * (r ** m / m) if exact else float(svol) * r ** m / m
    else:
        ivol = None  # radial integral, evaluated by quadrature
    names = {"t": "euclidean-ball", "sin": "spherical-cap", "sinh": "hyperbolic-ball"}
    return ModelGeometry(f"{names[profile]}:m={m},r={r}", m, R, ivol, 1, boundary, exact,
                         (prof, float(r)), {"m": m, "r": r, "profile": profile})


def euclidean_ball(m: int, r=1, exact: bool = True) -> ModelGeometry:
    return warped_product(m, "t", r, exact)


def flat_with_boundary(m: int, boundary: BoundaryData, euler_char: int, name: str = "flat",
                       volume=None) -> ModelGeometry:
    """Flat interior with caller-supplied boundary data."""
    if boundary.dims != m - 1:
        raise DomainError("boundary dimension must be m-1")
    exact = boundary.h.exact
    R = DoubleForm.zero(m, (2, 2), exact)
    return ModelGeometry(name, m, R, volume, euler_char, boundary, exact)


def ball_cross_sphere(p: int, q: int, exact: bool = True) -> ModelGeometry:
    """Round ``S^p`` times the unit ball ``B^{q+1}``, boundary ``S^p x S^q``.

    Frame: ``e_1..e_p`` on the round factor, ``e_{p+1}..e_{p+q}`` tangent to the
    boundary sphere of the ball, ``e_m`` the outer normal. All curvature lives on
    the round factor and the second fundamental form lives on the ball factor,
    so the Euler characteristic is ``chi(S^p) = 1 + (-1)^p``.
    """
    if p < 1 or q < 1:
        raise DomainError("ball_cross_sphere needs p, q >= 1")
    m = p + q + 1
    n = m - 1
    half = Fraction(1, 2) if exact else 0.5
    g1 = make_metric_form(p, exact).embed(n, 0)
    g2 = make_metric_form(q, exact).embed(n, p)
    R_bdry = owedge(g1, g1) * half
    R = R_bdry.embed(m, 0)
    Rbar = R_bdry + owedge(g2, g2) * half
    bvol = sphere_volume(p) * sphere_volume(q)
    ivol = sphere_volume(p) * sphere_volume(q) / (q + 1)
    boundary = BoundaryData(g2, Rbar, g1 + g2, _vol(bvol, exact))
    chi = 1 + (-1) ** p
    notes = ("curvature on the round factor, second fundamental form on the ball factor",)
    return ModelGeometry(f"ball-cross-sphere:p={p},q={q}", m, R, _vol(ivol, exact), chi, boundary,
                         exact, params={"p": p, "q": q}, notes=notes)


# --- registry --------------------------------------------------------------

def _int(v: str) -> int:
    try:
        return int(v)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {v!r}") from exc


def _real(v: str, exact: bool):
    try:
        return Fraction(v) if exact else float(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"expected a number, got {v!r}") from exc


def _build_sphere(kw, exact):
    return space_form(_int(kw.pop("m", "2")), _real(kw.pop("a", "1"), exact), exact)


def _build_bxs(kw, exact):
    return ball_cross_sphere(_int(kw.pop("p", "2")), _int(kw.pop("q", "1")), exact)


def _build_hyp(kw, exact):
    if exact:
        raise ConfigError("hyperbolic-ball needs quadrature; exact mode is not available")
    return warped_product(_int(kw.pop("m", "2")), "sinh", _real(kw.pop("r", "1"), False), False)


def _build_cap(kw, exact):
    if exact:
        raise ConfigError("spherical-cap needs quadrature; exact mode is not available")
    return warped_product(_int(kw.pop("m", "2")), "sin", _real(kw.pop("r", "0.7"), False), False)


def _build_ball(kw, exact):
    return euclidean_ball(_int(kw.pop("m", "2")), _real(kw.pop("r", "1"), exact), exact)


def _build_torus(kw, exact):
    return flat_torus(_int(kw.pop("m", "2")), exact)


REGISTRY: dict[str, Callable[[dict, bool], ModelGeometry]] = {
    "sphere": _build_sphere,
    "ball-cross-sphere": _build_bxs,
    "hyperbolic-ball": _build_hyp,
    "euclidean-ball": _build_ball,
    "flat-torus": _build_torus,
    "spherical-cap": _build_cap,
}

DEFAULT_EXACT = {"sphere": True, "ball-cross-sphere": True, "euclidean-ball": True,
                 "flat-torus": True, "hyperbolic-ball": False, "spherical-cap": False}


def parse_selector(selector: str) -> tuple[str, dict[str, str]]:
    """Split ``"name:key=value,key=value"``."""
    name, _, rest = selector.strip().partition(":")
    kw: dict[str, str] = {}
    if rest:
        for part in rest.split(","):
            key, eq, value = part.partition("=")
            if not eq or not key.strip() or not value.strip():
                raise ConfigError(f"malformed parameter {part!r} in {selector!r}")
            kw[key.strip()] = value.strip()
    return name.strip(), kw


def build_model(selector: str, exact: bool | None = None) -> ModelGeometry:
    """Build a registered model; ``exact=None`` picks the natural mode of the model."""
    name, kw = parse_selector(selector)
    if name not in REGISTRY:
        raise ConfigError(f"unknown model {name!r}; registry: {', '.join(sorted(REGISTRY))}")
    if exact is None:
        exact = DEFAULT_EXACT[name]
    try:
        model = REGISTRY[name](kw, exact)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if kw:
        raise ConfigError(f"unknown parameters for {name}: {', '.join(sorted(kw))}")
    return model
