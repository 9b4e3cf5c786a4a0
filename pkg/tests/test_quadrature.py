import math

import numpy as np
import pytest

from gbchern.combinat import sphere_volume
from gbchern.errors import DomainError
from gbchern.quadrature import (gauss_legendre, integrate, integrate_radial, pairwise_sum,
                                sphere_point, sphere_rule)


@pytest.mark.parametrize("n", [1, 2, 5, 16])
def test_gauss_legendre_exact_to_degree(n):
    rule = gauss_legendre(-0.5, 2.0, n)
    for deg in range(2 * n):
        exact = (2.0 ** (deg + 1) - (-0.5) ** (deg + 1)) / (deg + 1)
        got = integrate(rule, lambda x: x ** deg).value
        assert got == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_gauss_legendre_limits():
    with pytest.raises(DomainError):
        gauss_legendre(1.0, 1.0, 4)
    with pytest.raises(DomainError):
        gauss_legendre(0.0, 1.0, 0)
    with pytest.raises(DomainError):
        gauss_legendre(0.0, 1.0, 129)


def test_sinh_power_integral():
    # int_0^1 sinh(t)^3 dt = cosh^3/3 - cosh at 1, plus 2/3
    c = math.cosh(1.0)
    exact = c ** 3 / 3 - c + 2 / 3
    res = integrate_radial(lambda t: math.sinh(t) ** 3, 0.0, 1.0, 32)
    assert res.value == pytest.approx(exact, rel=1e-14)
    assert res.error_estimate < 1e-12
    assert res.evaluations == 48


@pytest.mark.parametrize("d", range(1, 6))
def test_sphere_rule_measure_is_volume(d):
    # sin-power weights are not polynomial, so convergence is spectral rather than exact
    rule = sphere_rule(d, 4)
    assert rule.measure == pytest.approx(float(sphere_volume(d)), rel=1e-13)


@pytest.mark.parametrize("d", range(1, 6))
def test_sphere_points_lie_on_sphere(d):
    rule = sphere_rule(d, 1)
    for p in rule.points[:: max(1, len(rule) // 50)]:
        assert np.linalg.norm(sphere_point(p)) == pytest.approx(1.0, abs=1e-14)


def test_sphere_rule_integrates_polynomial():
    # int_{S^2} z^2 = 4 pi / 3
    rule = sphere_rule(2, 4)
    res = integrate(rule, lambda a: sphere_point(a)[0] ** 2)
    assert res.value == pytest.approx(4 * math.pi / 3, rel=1e-13)
    # int_{S^3} x_1^2 x_4^2 = Vol(S^3) / 24
    res = integrate(sphere_rule(3, 4), lambda a: (sphere_point(a)[0] * sphere_point(a)[3]) ** 2)
    assert res.value == pytest.approx(2 * math.pi ** 2 / 24, rel=1e-12)


def test_refinement_error_decreases_to_roundoff():
    f = lambda a: math.exp(sphere_point(a)[0])
    exact = 2 * math.pi * (math.e - 1 / math.e)
    errs = [abs(integrate(sphere_rule(2, lvl), f).value - exact) for lvl in range(1, 5)]
    floor = 1e-13
    for a, b in zip(errs, errs[1:]):
        assert b <= max(a, floor)
    assert errs[-1] < floor


def test_error_estimate_tracks_true_error():
    f = lambda a: math.exp(sphere_point(a)[0])
    exact = 2 * math.pi * (math.e - 1 / math.e)
    assert integrate(sphere_rule(2, 1), f).error_estimate == 0.0
    res = integrate(sphere_rule(2, 2), f)
    assert 0 < res.error_estimate
    assert abs(res.value - exact) <= res.error_estimate
    assert sphere_rule(2, 1).coarser is None
    assert sphere_rule(2, 3).coarser.level == 2


def test_non_finite_integrand_names_node():
    rule = gauss_legendre(0.0, 1.0, 4)
    with pytest.raises(DomainError, match="node"):
        integrate(rule, lambda t: float("nan") if t > 0.5 else 1.0)


def test_workers_give_identical_sums():
    rule = sphere_rule(3, 2)
    f = lambda a: math.cos(a[0]) ** 2 + math.sin(a[-1])
    serial = integrate(rule, f).value
    parallel = integrate(rule, f, workers=4).value
    assert serial == parallel


def test_pairwise_sum():
    assert pairwise_sum([]) == 0.0
    assert pairwise_sum([1.0, 2.0, 3.0]) == 6.0
    vals = np.full(1 << 16, 0.1)
    assert pairwise_sum(vals) == pytest.approx(6553.6, rel=1e-15)


def test_sphere_rule_limits():
    with pytest.raises(DomainError):
        sphere_rule(6, 1)
    with pytest.raises(DomainError):
        sphere_rule(2, 0)
