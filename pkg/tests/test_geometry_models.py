from fractions import Fraction

import pytest

from gbchern import geometry_models as gm
from gbchern.combinat import PiRational, sphere_volume
from gbchern.double_forms import first_bianchi_residual, make_metric_form, owedge
from gbchern.errors import ConfigError, DomainError

HALF = Fraction(1, 2)

BOUNDARY_MODELS = [
    lambda: gm.euclidean_ball(4),
    lambda: gm.euclidean_ball(6, Fraction(3, 2)),
    lambda: gm.ball_cross_sphere(2, 1),
    lambda: gm.ball_cross_sphere(2, 3),
    lambda: gm.ball_cross_sphere(3, 2),
    lambda: gm.warped_product(4, "sinh", 0.8, exact=False),
    lambda: gm.warped_product(6, "sin", 1.1, exact=False),
]


@pytest.mark.parametrize("make", BOUNDARY_MODELS)
def test_boundary_models_satisfy_gauss_equation(make):
    model = make()
    res = model.gauss_residual()
    assert res.max_abs() <= (0 if model.exact else 1e-12)


@pytest.mark.parametrize("make", BOUNDARY_MODELS)
def test_curvatures_are_algebraic_curvature_tensors(make):
    model = make()
    R = model.curvature
    tol = 0 if model.exact else 1e-12
    assert R.is_symmetric(atol=tol)
    assert abs(first_bianchi_residual(R)) <= tol
    assert model.boundary.h.is_symmetric(atol=tol)
    assert abs(first_bianchi_residual(model.boundary.Rbar)) <= tol


def test_space_form_curvature_values():
    S = gm.space_form(4, 1)
    assert S.curvature.evaluate((1, 2), (1, 2)) == 1
    assert S.curvature.evaluate((1, 2), (2, 1)) == -1
    assert S.volume == PiRational(Fraction(8, 3), 2)
    assert S.euler_char == 2
    S3 = gm.space_form(2, 4)
    assert S3.curvature.evaluate((1, 2), (1, 2)) == 4
    assert S3.volume == PiRational(1, 1)


def test_odd_spheres_and_tori():
    assert gm.space_form(3, 1).euler_char == 0
    assert gm.flat_torus(3).curvature.is_zero()
    with pytest.raises(DomainError):
        gm.space_form(3, 2)
    with pytest.raises(DomainError):
        gm.space_form(4, -1)


def test_euclidean_ball_boundary_data():
    B = gm.euclidean_ball(4, 2)
    assert B.boundary.h == make_metric_form(3) * HALF
    assert B.boundary.volume == sphere_volume(3) * 8
    assert B.volume == sphere_volume(3) * 4
    assert B.curvature.is_zero()


def test_ball_cross_sphere_frame():
    M = gm.ball_cross_sphere(2, 1)
    assert M.m == 4 and M.euler_char == 2
    assert M.boundary.h.coeffs == {((3,), (3,)): 1}
    assert M.curvature.coeffs == {((1, 2), (1, 2)): 1}
    assert M.volume == sphere_volume(2) * sphere_volume(1) / 2
    assert gm.ball_cross_sphere(3, 2).euler_char == 0


def test_warped_product_modes():
    with pytest.raises(DomainError):
        gm.warped_product(4, "sinh", 1, exact=True)
    with pytest.raises(DomainError):
        gm.warped_product(4, "sin", 3.5, exact=False)
    with pytest.raises(DomainError):
        gm.warped_product(4, "cosh", 1.0, exact=False)
    cap = gm.warped_product(4, "sin", 0.7, exact=False)
    assert cap.volume is None and cap.radial[1] == 0.7


def test_registry_defaults_and_errors():
    assert gm.build_model("sphere:m=4").exact
    assert not gm.build_model("hyperbolic-ball:m=4,r=0.5").exact
    assert gm.build_model("sphere:m=4", exact=False).volume == pytest.approx(8 * 3.141592653589793 ** 2 / 3)
    assert gm.build_model("euclidean-ball:m=2,r=3/2").boundary.volume == PiRational(3, 1)
    with pytest.raises(ConfigError, match="registry"):
        gm.build_model("klein-bottle")
    with pytest.raises(ConfigError):
        gm.build_model("sphere:m=4,colour=red")
    with pytest.raises(ConfigError):
        gm.build_model("sphere:m=four")
    with pytest.raises(ConfigError):
        gm.build_model("sphere:m")
    with pytest.raises(ConfigError):
        gm.build_model("hyperbolic-ball:m=4", exact=True)
    with pytest.raises(ConfigError):
        gm.build_model("sphere:m=3,a=2")


def test_no_boundary_access():
    with pytest.raises(DomainError):
        gm.space_form(2).boundary_restricted_curvature()
