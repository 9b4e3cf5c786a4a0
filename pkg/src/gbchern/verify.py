"""Verification suites: each check returns a :class:`VerificationReport`.

Coefficient functions are looked up through the ``combinat`` module at call time,
so a patched coefficient is seen by the suites (the CLI negative-path tests rely
on this).
"""
from __future__ import annotations

import itertools
import math
import random
import traceback
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import combinat as cb
from . import gauss_bonnet as gb
from . import geometry_models as gm
from . import metric_engine as me
from .double_forms import (DoubleForm, brute_force_contract, df_power, full_contract,
                           make_metric_form, owedge)


@dataclass
class VerificationReport:
    name: str
    expected: str
    computed: str
    tolerance: float | None
    passed: bool
    provenance: str
    details: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "expected": self.expected, "computed": self.computed,
                "tolerance": self.tolerance, "passed": self.passed,
                "provenance": self.provenance, "details": self.details}

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.computed}"


class _Collector:
    """Accumulates sub-checks; the first failures are kept as details."""

    def __init__(self):
        self.count = 0
        self.failures: list[str] = []
        self.notes: list[str] = []

    def check(self, ok: bool, label: str) -> None:
        self.count += 1
        if not ok:
            self.failures.append(label)

    def report(self, name, expected, tolerance, provenance) -> VerificationReport:
        passed = not self.failures
        computed = (f"{self.count} checks passed" if passed
                    else f"{len(self.failures)} of {self.count} checks failed")
        return VerificationReport(name, expected, computed, tolerance, passed, provenance,
                                  self.failures[:20] + self.notes)


# --- coefficients ----------------------------------------------------------

def check_coefficients(m_max: int = 12) -> VerificationReport:
    c = _Collector()
    for m in range(2, m_max + 1, 2):
        top = m // 2 - 1
        for k in range(top + 1):
            a = cb.coeff_a(m, k)
            c.check(a == cb.coeff_a_product(m, k), f"a closed form = product form at m={m}, k={k}")
            c.check(cb.coeff_b(m, k) == a * 2 ** k * math.factorial(k) * math.factorial(m - 2 * k - 1),
                    f"b = a 2^k k! (m-2k-1)! at m={m}, k={k}")
            c_closed = Fraction((-1) ** (m // 2 - k - 1) * cb.double_factorial(m - 2 * k - 3))
            wb = sum((cb.coeff_w(m, p, k) * cb.coeff_b(m, p) for p in range(k, top + 1)), Fraction(0))
            c.check(c_closed == wb, f"c = sum w b at m={m}, k={k}")
            for r in range(top + 1):
                lhs = (Fraction(m - 2 * k - 1, 2 * (k + 1)) * cb.coeff_lambda(m, k, r)
                       + cb.coeff_lambda(m, k - 1, r))
                c.check(lhs == (1 if k == r else 0), f"lambda recurrence at m={m}, k={k}, r={r}")
        try:
            gsum = sum((cb.coeff_gamma(m, k) for k in range(top + 1)), Fraction(0))
        except ArithmeticError as exc:  # c's internal cross-check tripped
            c.check(False, f"sum of gamma at m={m}: {exc}")
        else:
            c.check(gsum == cb.double_factorial(m - 2), f"sum of gamma = (m-2)!! at m={m}")
        lhs = cb.sphere_volume(m - 1) * (cb.coeff_a(m, 0) * math.factorial(m - 1))
        c.check(lhs == cb.two_pi_power(m), f"a(m,0) (m-1)! Vol(S^(m-1)) = (2 pi)^(m/2) at m={m}")
    return c.report("coefficient identities", "exact equality", None, "exact rational arithmetic")


# --- algebra ---------------------------------------------------------------

def random_antisym(rng: random.Random, m: int, lo: int = -9, hi: int = 9) -> list[list[int]]:
    A = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            v = rng.randint(lo, hi)
            A[i][j], A[j][i] = v, -v
    return A


def check_pfaffian(samples: int = 200, seed: int = 2) -> VerificationReport:
    rng = random.Random(seed)
    c = _Collector()
    for m in (2, 4, 6, 8):
        for s in range(samples):
            A = random_antisym(rng, m)
            pp = cb.pfaffian_pairings(A)
            c.check(cb.pfaffian_perm(A) == pp, f"permutation sum = pairing sum, m={m}, sample {s}")
            c.check(pp * pp == cb.det_exact(A), f"Pf^2 = det, m={m}, sample {s}")
    for m in range(2, 11, 2):
        n = sum(1 for _ in cb.pairings(m))
        c.check(n == cb.double_factorial(m - 1), f"|pairings({m})| = {n}, expected (m-1)!!")
    for m in range(2, 9, 2):
        n = sum(1 for s in itertools.permutations(range(m)) if cb.is_canonical_pairing(s))
        c.check(n == cb.double_factorial(m - 1), f"canonical permutations of S_{m} = {n}")
    return c.report("Pfaffian sums", "exact equality", None, "brute-force permutation oracle")


def random_double_form(rng: random.Random, n: int, bidegree: tuple[int, int],
                       terms: int | None = None, exact: bool = True) -> DoubleForm:
    k, l = bidegree
    lefts = list(itertools.combinations(range(1, n + 1), k))
    rights = list(itertools.combinations(range(1, n + 1), l))
    if terms is None:
        terms = rng.randint(1, 6)
    coeffs = {}
    for _ in range(terms):
        key = (rng.choice(lefts), rng.choice(rights))
        coeffs[key] = (Fraction(rng.randint(-9, 9), rng.randint(1, 4)) if exact
                       else rng.uniform(-2, 2))
        # occasionally hit the diagonal so full contractions are non-trivial
        if k == l and rng.random() < 0.5:
            coeffs[(key[0], key[0])] = Fraction(rng.randint(-9, 9)) if exact else rng.uniform(-2, 2)
    return DoubleForm(n, bidegree, coeffs, exact)


def check_contraction(samples: int = 500, seed: int = 3) -> VerificationReport:
    rng = random.Random(seed)
    c = _Collector()
    for s in range(samples):
        n = rng.randint(1, 5)
        p = rng.randint(0, n)
        psi = random_double_form(rng, n, (p, p))
        c.check(full_contract(psi) == brute_force_contract(psi), f"oracle sample {s} (n={n}, p={p})")
    for n in range(1, 9):
        g = make_metric_form(n)
        for q in range(n + 1):
            val = full_contract(df_power(g, q))
            c.check(val == math.factorial(n) * math.factorial(q) // math.factorial(n - q),
                    f"C^q(g^q) at n={n}, q={q}")
    for s in range(60):
        n = rng.randint(2, 6)
        p = rng.randint(0, n - 1)
        psi = random_double_form(rng, n, (p, p))
        g = make_metric_form(n)
        base = full_contract(psi)
        for q in range(1, min(3, n - p) + 1):
            lhs = full_contract(owedge(psi, df_power(g, q)))
            prod = math.prod((p + j) * (n - p + 1 - j) for j in range(1, q + 1))
            binom = math.factorial(q) ** 2 * math.comb(p + q, q) * math.comb(n - p, q)
            c.check(lhs == prod * base and prod == binom, f"product rule n={n}, p={p}, q={q}")
    return c.report("contraction oracle and metric powers", "exact equality", None,
                    "brute-force index-tuple oracle")


def random_symmetric(rng: random.Random, m: int) -> DoubleForm:
    A = np.array([[rng.uniform(-2, 2) for _ in range(m)] for _ in range(m)])
    return DoubleForm.from_matrix((A + A.T) / 2, exact=False)


def check_gauss_kronecker(samples: int = 100, seed: int = 10, rtol: float = 1e-10) -> VerificationReport:
    rng = random.Random(seed)
    c = _Collector()
    for m in (2, 4):
        for s in range(samples):
            h = random_symmetric(rng, m)
            K = gb.gauss_kronecker(h)
            R = owedge(h, h) * 0.5
            Ki = gb.gauss_kronecker_intrinsic(R, m)
            c.check(abs(K - Ki) <= rtol * max(1.0, abs(K)), f"determinant vs intrinsic, m={m}, sample {s}")
        g = make_metric_form(m)
        R1 = owedge(g, g) * Fraction(1, 2)
        c.check(gb.gb_density_to_gk(R1, m) == 1, f"unit sphere K via density, m={m}")
        c.check(gb.gauss_kronecker(g) == 1, f"unit sphere K via determinant, m={m}")
    return c.report("Gauss-Kronecker routes", "agreement", rtol, "determinant oracle")


# --- models ----------------------------------------------------------------

def check_space_forms(quad_tol: float = 1e-6) -> VerificationReport:
    c = _Collector()
    for m in (2, 4, 6, 8, 10):
        model = gm.space_form(m, 1)
        rep = gb.euler_estimate(model)
        c.check(rep.chi_estimate_b == 2, f"exact chi of S^{m} = {rep.chi_estimate_b}")
        lhs = model.volume * (model.params["a"] ** (m // 2))
        c.check(lhs == cb.sphere_volume(m) * Fraction(model.euler_char, 2),
                f"a^(m/2) Vol = Vol(S^m) chi / 2 at m={m}")
    for m in (2, 4):
        rep = gb.euler_estimate(gm.space_form(m, 1, exact=False), method="quadrature")
        c.check(abs(rep.chi_estimate_b - 2) <= quad_tol, f"quadrature chi of S^{m} = {rep.chi_estimate_b}")
    return c.report("closed space forms", "chi = 2", quad_tol, "closed form and product quadrature")


def check_ball_cross_sphere() -> VerificationReport:
    c = _Collector()
    for p, q in ((2, 1), (2, 3), (4, 1)):
        model = gm.ball_cross_sphere(p, q)
        m = model.m
        rep = gb.euler_estimate(model)
        target = cb.two_pi_power(m) * 2
        c.check(rep.interior == 0, f"interior term zero for ({p},{q})")
        c.check(rep.interior + rep.total_b == target, f"b total = 2 (2 pi)^(m/2) for ({p},{q}): {rep.total_b}")
        c.check(rep.interior + rep.total_c == target, f"c total = 2 (2 pi)^(m/2) for ({p},{q}): {rep.total_c}")
        vol = model.boundary.volume
        c.check(isinstance(vol, cb.PiRational) and vol == cb.sphere_volume(p) * cb.sphere_volume(q),
                f"boundary volume is the exact product for ({p},{q})")
        k = p // 2
        qk = gb.q_functional(model.boundary_restricted_curvature(), model.boundary.h, m - 1, k, vol)
        expected = vol * Fraction(math.factorial(p), 2 ** k * math.factorial(k))
        c.check(qk == expected, f"Q_(p/2) = p!/(2^(p/2)(p/2)!) Vol(S^p)Vol(S^q) for ({p},{q}): {qk}")
    for p, q in ((1, 2), (3, 2), (1, 4)):
        rep = gb.euler_estimate(gm.ball_cross_sphere(p, q))
        c.notes.append(f"odd p={p}, even q={q}: estimate {rep.chi_estimate_b}, chi(S^p x B^(q+1)) = 0")
    return c.report("round sphere times ball", "total = 2 (2 pi)^(m/2)", None, "exact contraction")


def check_warped_balls(n_nodes: int = 32, tol: float = 1e-9) -> VerificationReport:
    c = _Collector()
    for m in (2, 4, 6):
        rep = gb.euler_estimate(gm.euclidean_ball(m))
        c.check(rep.chi_estimate_b == 1 and rep.chi_estimate_c == 1, f"Euclidean ball chi at m={m}")
        for r in (0.5, 1.0, 2.0):
            lhs, target = gb.hyperbolic_ball_identity(m, r, n_nodes)
            c.check(abs(lhs - target) <= tol, f"hyperbolic identity m={m}, r={r}: {lhs} vs {target}")
        for r in (0.5, 1.0, 1.4):
            lhs, target = gb.spherical_ball_identity(m, r, n_nodes)
            c.check(abs(lhs - target) <= tol, f"spherical identity m={m}, r={r}: {lhs} vs {target}")
    return c.report("warped-product balls", "chi = 1, identities = (m-2)!!", tol,
                    "Gauss-Legendre radial quadrature")


def check_flat(tol: float = 1e-8) -> VerificationReport:
    c = _Collector()
    for m in (2, 3, 4, 5):
        rep = gb.flat_check(gm.euclidean_ball(m))
        c.check(rep.integral_K == cb.sphere_volume(m - 1) * rep.chi_declared and rep.degree_estimate == 1,
                f"boundary K integral of B^{m}: {rep.integral_K}")
    for m in (2, 3, 4):
        rep = gb.flat_check(gm.flat_torus(m))
        c.check(rep.integral_K == 0 and rep.chi_declared == 0, f"flat torus T^{m}")
    for r in (0.3, 0.7, 1.2, 2.5):
        model = gm.warped_product(2, "sin", r, exact=False)
        rep = gb.euler_estimate(model)
        total = float(rep.interior) + float(rep.total_c)
        c.check(abs(total - 2 * math.pi) <= tol, f"spherical cap r={r}: {total}")
    return c.report("flat boundary theorem", "integral K = Vol(S^(m-1)) chi", tol, "closed form")


def _boundary_models() -> list[gm.ModelGeometry]:
    models = [gm.euclidean_ball(m) for m in (2, 4, 6)]
    models += [gm.euclidean_ball(4, Fraction(3, 2))]
    models += [gm.ball_cross_sphere(p, q) for p, q in ((2, 1), (2, 3), (4, 1), (1, 2), (3, 2), (1, 1))]
    for m in (2, 4, 6):
        models.append(gm.warped_product(m, "sinh", 1.0, exact=False))
        models.append(gm.warped_product(m, "sin", 0.7, exact=False))
        models.append(gm.euclidean_ball(m, 1.3, exact=False))
    return models


def check_bc_agreement(tol: float = 1e-9) -> VerificationReport:
    c = _Collector()
    for model in _boundary_models():
        if model.m % 2:
            continue
        b = gb.boundary_term_b(model).total
        cc = gb.boundary_term_c(model).total
        if model.exact:
            c.check(b == cc, f"{model.name}: exact b={b}, c={cc}")
        else:
            c.check(abs(b - cc) <= tol, f"{model.name}: |b - c| = {abs(b - cc)}")
    return c.report("b/c boundary formulations", "equal totals", tol, "Gauss equation")


# --- metric engine ---------------------------------------------------------

def _space_form_tensor(n: int, a: float) -> np.ndarray:
    T = np.zeros((n,) * 4)
    for i in range(n):
        for j in range(n):
            if i != j:
                T[i, j, i, j] = a
                T[i, j, j, i] = -a
    return T


def check_metric_engine(tol: float = 1e-5, res_tol: float = 1e-4) -> VerificationReport:
    c = _Collector()
    curved = ["round-sphere:m=2", "round-sphere:m=3", "stereo-sphere:m=2", "hyperbolic:m=2",
              "hyperbolic:m=3", "warped:f=sin,m=4", "warped:f=sinh,m=4"]
    flat = ["polar-flat", "spherical-flat", "warped:f=id,m=3"]
    for sel in curved + flat:
        chart = me.build_chart(sel)
        x = me.default_point(chart)
        a = me.chart_curvature_constant(sel)
        fc = me.curvature_frame(chart, x)
        err = float(np.abs(fc.tensor - _space_form_tensor(chart.dim, a)).max())
        c.check(err <= tol, f"{sel}: curvature error {err:.3e}")
        errs = [e for _, e in me.fd_convergence(chart, x, _space_form_tensor(chart.dim, a))]
        ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
        c.check(all(3.0 <= r <= 5.0 for r in ratios), f"{sel}: FD error ratios {ratios}")
        res = [me.structure_residuals(chart.with_step(s), x) for s in (4e-3, 2e-3, 1e-3)]
        c.check(res[-1].max() <= res_tol, f"{sel}: structure residual {res[-1].max():.3e}")
        c.check(res[-1].bianchi_algebraic_relative <= 1e-8, f"{sel}: algebraic Bianchi residual")
        tops = [r.max() for r in res]
        if tops[-1] > 1e-10:
            rr = [tops[i] / tops[i + 1] for i in range(2)]
            c.check(all(3.0 <= r <= 5.0 for r in rr), f"{sel}: structure residual ratios {rr}")
    return c.report("finite-difference curvature", "space-form curvature", tol, "closed-form curvature")


# --- registry --------------------------------------------------------------

CRITERIA: dict[int, Callable[[], VerificationReport]] = {
    1: check_coefficients,
    2: check_pfaffian,
    3: check_contraction,
    4: check_space_forms,
    5: check_ball_cross_sphere,
    6: check_warped_balls,
    7: check_flat,
    8: check_bc_agreement,
    9: check_metric_engine,
    10: check_gauss_kronecker,
}

SUITES: dict[str, tuple[int, ...]] = {
    "coefficients": (1,),
    "algebra": (2, 3, 10),
    "models": (4, 5, 6, 7, 8),
    "metric-engine": (9,),
    "all": tuple(range(1, 11)),
}


def run_check(number: int) -> VerificationReport:
    fn = CRITERIA[number]
    try:
        rep = fn()
    except Exception as exc:  # a crash is a failed identity, reported rather than raised
        rep = VerificationReport(fn.__name__, "no exception", f"{type(exc).__name__}: {exc}", None,
                                 False, "exception", traceback.format_exc().splitlines()[-5:])
    rep.name = f"[{number}] {rep.name}"
    return rep


def run_suite(suite: str) -> list[VerificationReport]:
    if suite not in SUITES:
        raise KeyError(suite)
    return [run_check(n) for n in SUITES[suite]]
