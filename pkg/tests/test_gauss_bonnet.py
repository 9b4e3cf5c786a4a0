import math
import random
from fractions import Fraction

import numpy as np
import pytest

from gbchern import gauss_bonnet as gb
from gbchern import geometry_models as gm
from gbchern.combinat import PiRational, coeff_gamma, double_factorial, sphere_volume, two_pi_power
from gbchern.double_forms import DoubleForm, brute_force_contract, df_power, make_metric_form, owedge
from gbchern.errors import CostGuardError, DomainError
from gbchern.verify import random_double_form, random_symmetric

HALF = Fraction(1, 2)


def unit_R(n, exact=True):
    g = make_metric_form(n, exact)
    return owedge(g, g) * (HALF if exact else 0.5)


@pytest.mark.parametrize("m, expected", [(2, 1), (4, 3), (6, 15), (8, 105)])
def test_gb_density_of_unit_sphere(m, expected):
    # (2pi)^{m/2} chi(S^m) / Vol(S^m) = (m-1)!!
    assert gb.gb_density(unit_R(m), m) == expected
    assert PiRational.of(sphere_volume(m)) * expected == two_pi_power(m) * 2


def test_gb_density_flat_and_odd():
    assert gb.gb_density(DoubleForm.zero(4, (2, 2)), 4) == 0
    with pytest.raises(DomainError):
        gb.gb_density(unit_R(3), 3)
    with pytest.raises(DomainError):
        gb.gb_density(unit_R(4), 2)
    with pytest.raises(DomainError):
        gb.gb_density(make_metric_form(4), 4)


def test_gb_density_brute_force_oracle():
    R = unit_R(4)
    assert gb.gb_density(R, 4) == Fraction(brute_force_contract(df_power(R, 2)), math.factorial(4) * 2)


def _rotate(R: DoubleForm, Q: np.ndarray) -> DoubleForm:
    T = R.to_tensor4()
    return DoubleForm.from_tensor4(np.einsum("ai,bj,ck,dl,abcd->ijkl", Q, Q, Q, Q, T))


@pytest.mark.parametrize("m", [2, 4, 6])
def test_gb_density_is_frame_invariant(m):
    rng = np.random.default_rng(m)
    # a generic algebraic curvature tensor: sum of h(x)h' from symmetric matrices
    R = DoubleForm.zero(m, (2, 2), exact=False)
    for _ in range(3):
        A = rng.normal(size=(m, m)); A = A + A.T
        B = rng.normal(size=(m, m)); B = B + B.T
        R = R + owedge(DoubleForm.from_matrix(A, exact=False), DoubleForm.from_matrix(B, exact=False))
    Q, _ = np.linalg.qr(rng.normal(size=(m, m)))
    before = gb.gb_density(R, m)
    after = gb.gb_density(_rotate(R, Q), m)
    assert after == pytest.approx(before, rel=1e-10, abs=1e-10)


def test_lk_density_examples():
    assert gb.lk_density(unit_R(3), 3, 0) == 1
    assert gb.lk_density(unit_R(3), 3, 1) == 3
    with pytest.raises(DomainError):
        gb.lk_density(unit_R(3), 3, 2)


@pytest.mark.parametrize("n, k", [(n, k) for n in range(2, 7) for k in range(n // 2 + 1)])
def test_lk_density_space_form_closed_form(n, k):
    a = Fraction(3, 2)
    R = unit_R(n) * a
    expected = Fraction(math.factorial(n), 2 ** k * math.factorial(k) * math.factorial(n - 2 * k)) * a ** k
    assert gb.lk_density(R, n, k) == expected
    assert gb.lk_density_via_q(R, n, k) == expected


def test_lk_density_via_q_on_random_curvature():
    rng = random.Random(4)
    for n in (3, 4, 5):
        h1 = random_double_form(rng, n, (1, 1))
        h2 = random_double_form(rng, n, (1, 1))
        R = owedge(h1 + h1.T, h2 + h2.T)
        for k in range(n // 2 + 1):
            assert gb.lk_density(R, n, k) == gb.lk_density_via_q(R, n, k)


def test_q_functional_examples():
    g3 = make_metric_form(3)
    vol = sphere_volume(3)
    assert gb.q_functional(unit_R(3), g3, 3, 0, vol) == vol
    assert gb.q_functional(DoubleForm.zero(3, (2, 2)), g3, 3, 1, vol) == 0
    M = gm.ball_cross_sphere(2, 1)
    A = M.boundary_restricted_curvature()
    q = gb.q_functional(A, M.boundary.h, 3, 1, M.boundary.volume)
    assert q == PiRational(8, 2)
    with pytest.raises(DomainError):
        gb.q_functional(A, A, 3, 1, 1)


def test_gauss_kronecker_examples():
    assert gb.gauss_kronecker(make_metric_form(3)) == 1
    h = DoubleForm.from_matrix([[1, 0, 0], [0, 2, 0], [0, 0, 3]])
    assert gb.gauss_kronecker(h) == 6
    assert gb.gauss_kronecker_contract(h) == 6
    h2 = DoubleForm.from_matrix([[2, 0], [0, 3]])
    R = owedge(h2, h2) * HALF
    assert gb.gauss_kronecker_intrinsic(R, 2) == 6
    assert gb.gauss_kronecker_permsum(R, 2) == 6
    with pytest.raises(DomainError):
        gb.gauss_kronecker(DoubleForm.from_matrix([[1, 2], [0, 1]]))


@pytest.mark.parametrize("m", [2, 4])
def test_gauss_kronecker_routes_agree(m):
    rng = random.Random(100 + m)
    for _ in range(100):
        h = random_symmetric(rng, m)
        det = gb.gauss_kronecker(h)
        R = owedge(h, h) * 0.5
        assert gb.gauss_kronecker_intrinsic(R, m) == pytest.approx(det, rel=1e-10, abs=1e-12)
        assert gb.gauss_kronecker_contract(h) == pytest.approx(det, rel=1e-10, abs=1e-12)


def test_permsum_oracle_exact_and_guard():
    rng = random.Random(7)
    for m in (2, 4, 6):
        M = [[Fraction(rng.randint(-3, 3)) for _ in range(m)] for _ in range(m)]
        h = DoubleForm.from_matrix([[M[i][j] + M[j][i] for j in range(m)] for i in range(m)])
        R = owedge(h, h) * HALF
        assert gb.gauss_kronecker_permsum(R, m) == gb.gauss_kronecker_intrinsic(R, m) == gb.gauss_kronecker(h)
    with pytest.raises(CostGuardError):
        gb.gauss_kronecker_permsum(unit_R(8), 8)


@pytest.mark.parametrize("m", [2, 4, 6, 8])
def test_gb_density_to_gk_on_unit_sphere(m):
    assert gb.gb_density_to_gk(unit_R(m), m) == 1
    assert gb.gb_density_to_gk(DoubleForm.zero(m, (2, 2)), m) == 0


@pytest.mark.parametrize("m", [2, 4, 6, 8])
def test_euclidean_ball_boundary_terms(m):
    B = gm.euclidean_ball(m)
    bt = gb.boundary_term_b(B)
    assert bt.terms[0] == sphere_volume(m - 1) * double_factorial(m - 2)
    assert all(t == 0 for t in bt.terms[1:])
    ct = gb.boundary_term_c(B)
    for k, term in enumerate(ct.terms):
        assert term == sphere_volume(m - 1) * coeff_gamma(m, k)
    assert bt.total == ct.total == two_pi_power(m)


def test_disk_geodesic_curvature():
    ct = gb.boundary_term_c(gm.euclidean_ball(2, 3))
    assert ct.terms == (PiRational(2, 1),)


def test_ball_cross_sphere_boundary_term():
    M = gm.ball_cross_sphere(2, 1)
    assert gb.boundary_term_b(M).total == PiRational(8, 2)
    assert gb.boundary_term_c(M).total == PiRational(8, 2)


def test_warped_c_terms_match_gamma_formula():
    for profile, r in (("sin", 0.9), ("sinh", 0.6)):
        for m in (2, 4, 6):
            model = gm.warped_product(m, profile, r, exact=False)
            fp = model.radial[0].df(r)
            ct = gb.boundary_term_c(model)
            for k, term in enumerate(ct.terms):
                ref = float(coeff_gamma(m, k)) * float(sphere_volume(m - 1)) * fp ** (m - 2 * k - 1)
                assert term == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_boundary_term_without_boundary():
    with pytest.raises(DomainError):
        gb.boundary_term_b(gm.space_form(4))
    with pytest.raises(DomainError):
        gb.boundary_term_c(gm.flat_torus(4))


def test_corrupted_coefficient_breaks_agreement():
    M = gm.ball_cross_sphere(2, 1)
    bad = lambda m, k: Fraction(3) if k == 1 else gb.coeff_b(m, k)
    assert gb.boundary_term_b(M, coeff=bad).total != gb.boundary_term_c(M).total


def test_euler_estimate_sphere_exact_and_quadrature():
    rep = gb.euler_estimate(gm.space_form(4))
    assert rep.exact and rep.chi_estimate_b == 2 and rep.abs_err_b == 0
    q = gb.euler_estimate(gm.space_form(4, exact=False), method="quadrature", quad_level=3)
    assert q.interior_method == "quadrature"
    assert q.abs_err_b <= 1e-6


@pytest.mark.parametrize("m", [2, 4])
def test_fast_path_matches_quadrature(m):
    model = gm.space_form(m, 2, exact=False)
    fast = gb.interior_integral(model, "closed-form").value
    slow = gb.interior_integral(model, "quadrature", quad_level=3)
    assert slow.value == pytest.approx(fast, rel=1e-8)


def test_hyperbolic_ball_m2():
    rep = gb.euler_estimate(gm.build_model("hyperbolic-ball:m=2,r=1"))
    assert rep.chi_estimate_b == pytest.approx(1, abs=1e-12)
    assert rep.interior == pytest.approx(-2 * math.pi * (math.cosh(1) - 1), rel=1e-12)


@pytest.mark.parametrize("m", [2, 4, 6])
def test_warped_ball_identities(m):
    for r in (0.3, 1.0, 2.0):
        lhs, target = gb.hyperbolic_ball_identity(m, r)
        assert lhs == pytest.approx(target, abs=1e-9)
        lhs, target = gb.spherical_ball_identity(m, min(r, 3.0))
        assert lhs == pytest.approx(target, abs=1e-9)


def test_flat_torus_and_interior_methods():
    rep = gb.euler_estimate(gm.flat_torus(4))
    assert rep.chi_estimate_b == 0 and rep.chi_estimate_c == 0
    with pytest.raises(DomainError):
        gb.interior_integral(gm.space_form(4), "simpson")
    with pytest.raises(DomainError):
        gb.interior_integral(gm.warped_product(4, "sin", 1.0, exact=False), "closed-form")
    with pytest.raises(DomainError):
        gb.interior_integral(gm.space_form(6, exact=False), "quadrature")


def test_flat_check_examples():
    for m in (3, 4, 5):
        rep = gb.flat_check(gm.euclidean_ball(m))
        assert rep.degree_estimate == 1
    assert gb.flat_check(gm.flat_torus(3)).degree_estimate == 0
    assert gb.euler_estimate(gm.euclidean_ball(3)).abs_err == 0
    with pytest.raises(DomainError):
        gb.flat_check(gm.space_form(4))


def test_report_serialisation():
    rep = gb.euler_estimate(gm.ball_cross_sphere(2, 1))
    j = rep.to_json()
    for key in ("model", "m", "chi_declared", "interior", "boundary_b", "boundary_c",
                "chi_estimate_b", "chi_estimate_c", "abs_err_b", "abs_err_c"):
        assert key in j
    assert j["exact"]["chi_estimate_b"] == "2"
    assert list(rep.csv_row()) == list(gb.GBReport.CSV_FIELDS)
    assert rep.rel_err_b == 0
