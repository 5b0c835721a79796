import math

import pytest
from scipy import integrate

from pareto_irg.errors import ParameterError, QuadratureError
from pareto_irg.theory import specfun
from pareto_irg.sampling.heavytail import laplace_complement
from pareto_irg.theory.specfun import QuadratureSpec


def test_gamma_known_values_and_poles():
    assert specfun.gamma(0.5) == pytest.approx(math.sqrt(math.pi))
    assert specfun.gamma(-0.25) == pytest.approx(-4.9016668098, rel=1e-9)
    for pole in (0, -1, -3):
        with pytest.raises(ParameterError):
            specfun.gamma(pole)


def test_exp_integral_e1():
    assert specfun.exp_integral_e1(1.0) == pytest.approx(0.21938393439552, rel=1e-12)
    with pytest.raises(ParameterError):
        specfun.exp_integral_e1(0.0)


def _direct_upper_gamma(s, x):
    value, _ = integrate.quad(lambda t: t ** (s - 1.0) * math.exp(-t), x, math.inf,
                              epsabs=1e-14, epsrel=1e-12, limit=500)
    return value


@pytest.mark.parametrize("s", [2.5, 0.7, -0.25, -0.5, -1.35, -2.0, -3.0])
@pytest.mark.parametrize("x", [0.05, 1.0, 7.0])
def test_upper_incomplete_gamma_matches_integral(s, x):
    assert specfun.upper_incomplete_gamma(s, x) == pytest.approx(_direct_upper_gamma(s, x), rel=1e-8)


def test_upper_incomplete_gamma_zero_is_e1():
    assert specfun.upper_incomplete_gamma(0.0, 2.0) == pytest.approx(specfun.exp_integral_e1(2.0))


def test_incomplete_gamma_series_small_argument():
    s, x = -0.25, 1e-3
    assert specfun.incomplete_gamma_series(s, x) == pytest.approx(
        specfun.upper_incomplete_gamma(s, x), rel=1e-11)


def test_integrate_1d_power_law():
    # int_1^inf 0.5 t^{-1.5} dt = 1
    assert specfun.integrate_1d(lambda t: 0.5 * t ** -1.5, 1.0) == pytest.approx(1.0, rel=1e-8)


def test_integrate_1d_with_breakpoints():
    eps = 1e-6
    f = lambda t: -math.expm1(-eps * t) * 0.5 * t ** -1.5
    value = specfun.integrate_1d(f, 1.0, breakpoints=[1.0 / eps, 10.0 / eps])
    assert value == pytest.approx(laplace_complement(eps, 0.5), rel=1e-6)


def test_integrate_2d_product_density():
    f = lambda x, y: 0.25 * (x * y) ** -1.5
    assert specfun.integrate_2d(f, 1.0) == pytest.approx(1.0, rel=1e-7)


def test_integrate_box_dimensions():
    assert specfun.integrate_box(lambda u: u, 1) == pytest.approx(0.5)
    assert specfun.integrate_box(lambda u, v: u * v, 2) == pytest.approx(0.25)
    assert specfun.integrate_box(lambda u, v, w: u + v + w, 3) == pytest.approx(1.5)
    with pytest.raises(ParameterError):
        specfun.integrate_box(lambda u: u, 4)


def test_non_convergence_raises():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=3)
    with pytest.raises(QuadratureError):
        specfun.integrate_unit(lambda u: math.sin(1.0 / u) / u, spec)


def test_quadrature_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec(rel_tol=0.0)
    assert QuadratureSpec().doubled().max_subdivisions == 4000


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_e1_below_log_bound(x):
    assert specfun.exp_integral_e1(x) < math.exp(-x) * math.log1p(1.0 / x)


def test_loosened_spec_scales_only_relative_tolerance():
    base = QuadratureSpec()
    loose = base.loosened(1e3)
    assert loose.rel_tol == pytest.approx(base.rel_tol * 1e3)
    assert loose.abs_tol == base.abs_tol
    assert loose.max_subdivisions == base.max_subdivisions


def test_integrate_2d_with_tighter_inner_level():
    f = lambda x, y: 0.25 * (x * y) ** -1.5
    value = specfun.integrate_2d(f, 1.0, QuadratureSpec().loosened(1e3), inner_spec=QuadratureSpec())
    assert value == pytest.approx(1.0, rel=1e-6)


def test_integrate_box_with_tighter_inner_level():
    value = specfun.integrate_box(lambda u, v, w: u * v * w, 3,
                                  QuadratureSpec(rel_tol=1e-6), inner_spec=QuadratureSpec(rel_tol=1e-10))
    assert value == pytest.approx(0.125, rel=1e-6)
