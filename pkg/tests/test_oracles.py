import math

import numpy as np
import pytest
from scipy import special

from pareto_irg.errors import ParameterError
from pareto_irg.theory import oracles, specfun


SQRT_PI = math.sqrt(math.pi)


def test_mixing_constant():
    assert oracles.mixing_constant(0.5) == pytest.approx(SQRT_PI, rel=1e-12)


def test_mixed_poisson_pmf_values():
    # alpha = 1/2: c = sqrt(pi), P(D = 2) = c e^{-c} / 2
    assert oracles.mixed_poisson_pmf(2, 0.5) == pytest.approx(SQRT_PI * math.exp(-SQRT_PI) / 2, rel=1e-10)
    assert oracles.mixed_poisson_pmf(2, 0.5) == pytest.approx(0.15058, abs=1e-4)
    assert oracles.mixed_poisson_pmf(0, 0.5) == pytest.approx(0.05064, abs=1e-4)
    assert oracles.mixed_poisson_pmf(1, 0.5) == pytest.approx(SQRT_PI * special.exp1(SQRT_PI), rel=1e-10)
    with pytest.raises(ParameterError):
        oracles.mixed_poisson_pmf(-1, 0.5)
    with pytest.raises(ParameterError):
        oracles.mixed_poisson_pmf(1.5, 0.5)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_mixed_poisson_law_is_consistent(alpha):
    law = oracles.MixedPoissonLaw(alpha)
    pmf = law.pmf_array(50)
    assert pmf[:6] == pytest.approx([law.pmf(k) for k in range(6)], rel=1e-10)
    # the remaining mass is the closed-form tail
    assert pmf.sum() + law.ccdf(50) == pytest.approx(1.0, abs=1e-12)
    for k in (1, 2, 5, 20):
        assert law.ccdf(k) == pytest.approx(oracles.mixed_poisson_ccdf_summed(k, alpha), rel=1e-6)
    assert law.pgf(0.0) == pytest.approx(law.pmf(0), rel=1e-12)
    assert law.pgf(1.0) == 1.0


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_degree_tail_approaches_c_from_above(alpha):
    c = oracles.mixing_constant(alpha)
    scaled = [k * oracles.mixed_poisson_ccdf(k, alpha) for k in (10, 100, 1000, 10_000)]
    assert all(v > c for v in scaled)
    assert all(b < a for a, b in zip(scaled, scaled[1:]))
    assert scaled[-1] == pytest.approx(c, rel=1e-3)


def test_product_laplace_methods_agree():
    for eps in (1e-6, 1e-3, 0.5, 3.0):
        density = oracles.product_laplace_complement(eps, 0.5, "density")
        conditional = oracles.product_laplace_complement(eps, 0.5, "conditional")
        assert density == pytest.approx(conditional, rel=1e-7)
    with pytest.raises(ParameterError):
        oracles.product_laplace_complement(0.1, 0.5, "monte-carlo")


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_degree_correction_constant_closed_form(alpha):
    expected = special.gamma(1 - alpha) * (1 + alpha * special.digamma(1 - alpha)) / alpha
    assert oracles.degree_correction_constant(alpha) == pytest.approx(expected, rel=1e-6, abs=1e-8)


def test_degree_correction_sign_at_alpha_07():
    assert oracles.degree_correction_constant(0.7) == pytest.approx(-6.20, abs=0.01)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_second_order_degree_asymptotics(alpha):
    n, eps = 10_000, 1e-10
    exact = oracles.expected_degree_exact(n, eps, alpha)
    second = oracles.expected_degree_asymptotic(n, eps, alpha, order=2)
    third = oracles.expected_degree_asymptotic(n, eps, alpha, order=3)
    remainder = third / second - 1.0
    assert remainder > 0
    assert abs(exact / second - 1.0) <= 2.0 * remainder + 1e-7
    assert exact / third == pytest.approx(1.0, rel=1e-6)


def test_second_order_error_at_alpha_07_shrinks_like_remainder():
    # eps^{0.3} decay: about 1.7%, 0.45% and 0.13% along the critical scale
    a = 0.7
    errors = []
    for n in (1000, 10_000, 100_000):
        eps = n ** (-1.0 / a)
        exact = oracles.expected_degree_exact(n, eps, a)
        second = oracles.expected_degree_asymptotic(n, eps, a, order=2)
        third = oracles.expected_degree_asymptotic(n, eps, a, order=3)
        errors.append(exact / second - 1.0)
        assert errors[-1] == pytest.approx(third / second - 1.0, rel=0.05)
    assert errors == sorted(errors, reverse=True)
    assert errors[0] == pytest.approx(0.0173, abs=5e-4)
    assert errors[-1] == pytest.approx(0.0013, abs=1e-4)


def test_first_order_degree_formula():
    n, eps, a = 1000, 1e-4, 0.5
    value = oracles.expected_degree_asymptotic(n, eps, a)
    assert value == pytest.approx((n - 1) * SQRT_PI * a * eps ** a * math.log(1 / eps), rel=1e-12)
    with pytest.raises(ParameterError):
        oracles.expected_degree_asymptotic(n, 2.0, a)
    with pytest.raises(ParameterError):
        oracles.expected_degree_asymptotic(n, eps, a, order=4)
    assert oracles.expected_degree_exact(1, eps, a) == 0.0


def test_joint_pgf_marginal_reduces_to_single_pgf():
    for t in (0.2, 0.5, 0.9):
        assert oracles.joint_pgf_limit(t, 1.0, 0.5) == pytest.approx(
            oracles.mixed_poisson_pgf(t, 0.5), rel=1e-7)
    assert oracles.joint_pgf_limit(1.0, 1.0, 0.5) == 1.0


def test_joint_pgf_gap_is_positive_and_bounded():
    gap = oracles.joint_pgf_gap(0.6, 0.6, 0.5)
    assert gap > 0
    assert gap <= oracles.joint_pgf_gap_bound(0.4, 0.4, 0.5)
    with pytest.raises(ParameterError):
        oracles.joint_pgf_gap_bound(0.5, 0.1, 0.5)


def test_triangle_limit_constant():
    assert oracles.triangle_limit_constant(0.5) == pytest.approx(117.769, rel=1e-4)


def test_factorized_triangles_match_asymptotic_form():
    n, eps, a = 10 ** 6, 1e-12, 0.5
    exact = oracles.expected_triangles(n, eps, a, "exact-factorized")
    limit = oracles.expected_triangles(n, eps, a, "asymptotic")
    assert exact / limit == pytest.approx(1.0, rel=1e-3)


def test_true_domain_wedge_constant():
    a, eps = 0.5, 1e-10
    pair = oracles.wedge_pair_probability(eps, a)
    assert pair / eps ** a == pytest.approx(oracles.wedge_limit_constant(a, "true"), rel=1e-3)
    with pytest.raises(ParameterError):
        oracles.wedge_limit_constant(a, "other")
    with pytest.raises(ParameterError):
        oracles.expected_wedges(100, 0.01, a, mode="other")


def test_dust_thresholds_at_half():
    k1, k2 = oracles.dust_thresholds(0.5)
    assert k1 == pytest.approx(1 / math.pi, rel=1e-12)
    assert k2 == pytest.approx(0.92761, rel=1e-4)
    assert k1 < k2


def test_dust_exact_matches_critical_limit():
    n, a, k = 100_000, 0.5, 1.0
    eps = k * n ** (-1 / a)
    exact = oracles.dust_expectation(n, eps, a, "exact")
    assert exact / n == pytest.approx(oracles.isolated_probability_limit(k, a), rel=1e-2)
    assert oracles.dust_expectation(1, eps, a) == 1.0
    with pytest.raises(ParameterError):
        oracles.dust_expectation(n, eps, a, "guess")


def test_karamata_weight_target_passes():
    report = oracles.karamata_check(0.5, [1e-2, 1e-4, 1e-6], target="weight")
    assert report.monotone
    assert report.passed
    assert len(report.ratios()) == 3


def test_karamata_product_target_converges():
    report = oracles.karamata_check(0.5, [1e-6, 1e-8, 1e-10], target="product")
    assert abs(report.ratios()[-1] - 1.0) < 1e-2


def test_karamata_rejects_bad_grid():
    with pytest.raises(ParameterError):
        oracles.karamata_check(0.5, [1e-4, 1e-2])
    with pytest.raises(ParameterError):
        oracles.karamata_check(0.5, [1e-2], target="degree")


@pytest.mark.parametrize("k, trend", [(0.05, "increasing"), (3.0, "decreasing")])
def test_factorized_dust_direction_follows_k1(k, trend):
    a = 0.5
    values = [oracles.dust_expectation(n, k * n ** (-1 / a), a, "factorized") for n in (1000, 10_000, 100_000)]
    steps = np.diff(values)
    assert np.all(steps > 0) if trend == "increasing" else np.all(steps < 0)


def test_triangle_probability_converges_at_default_tolerance():
    assert oracles.triangle_probability(1e-3, 0.5) == pytest.approx(0.032161, rel=1e-4)
    per_node = oracles.expected_triangles(1000, 1e-6, 0.5, "true-domain")
    assert per_node == pytest.approx(999 * 998 / 6 * oracles.triangle_probability(1e-6, 0.5), rel=1e-12)
    # the cutoff of the weight domain at 1 only removes mass
    limit = oracles.expected_triangles(1000, 1e-6, 0.5, "asymptotic") * 999 * 998 / 1000 ** 2
    assert 0.9 < per_node / limit < 1.0


def _pareto_pair(eps):
    # W = u^{-2} at alpha = 1/2
    return lambda u, v: -math.expm1(-eps / (u * u * v * v))


@pytest.mark.slow
def test_wedge_and_triangle_reductions_match_box_quadrature():
    eps = 1e-3
    p = _pareto_pair(eps)
    outer = specfun.QuadratureSpec(rel_tol=1e-6, abs_tol=1e-12)
    inner = specfun.QuadratureSpec(rel_tol=1e-8, abs_tol=1e-13)
    wedge = specfun.integrate_box(lambda u, v, w: p(u, v) * p(u, w), 3, outer, inner)
    triangle = specfun.integrate_box(lambda u, v, w: p(u, v) * p(u, w) * p(v, w), 3, outer, inner)
    assert oracles.wedge_pair_probability(eps, 0.5) == pytest.approx(wedge, rel=1e-5)
    assert oracles.triangle_probability(eps, 0.5) == pytest.approx(triangle, rel=1e-4)


@pytest.mark.parametrize("statistic", [oracles.expected_wedges, oracles.expected_triangles])
def test_factorized_motif_counts_increase_in_eps(statistic):
    values = [statistic(1000, eps, 0.5, "exact-factorized") for eps in (1e-8, 1e-6, 1e-4, 1e-2)]
    assert values[0] > 0
    assert all(b > a for a, b in zip(values, values[1:]))


def test_true_domain_wedges_increase_in_eps():
    values = [oracles.expected_wedges(1000, eps, 0.5, "true-domain") for eps in (1e-7, 1e-5, 1e-3)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.slow
def test_true_domain_triangles_increase_in_eps():
    values = [oracles.triangle_probability(eps, 0.5) for eps in (1e-7, 1e-5, 1e-3)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_triangles_per_wedge_scale_like_sqrt_eps_power():
    a = 0.5
    scaled = []
    for eps in (1e-6, 1e-7, 1e-8):
        ratio = (oracles.expected_triangles(1000, eps, a, "exact-factorized")
                 / oracles.expected_wedges(1000, eps, a, "exact-factorized"))
        scaled.append(ratio / eps ** (a / 2))
    assert max(scaled) / min(scaled) < 1.02


def test_joint_pgf_gap_bound_grows_with_eta():
    for gamma_ in (0.05, 0.2, 0.4):
        bounds = [oracles.joint_pgf_gap_bound(eta, gamma_, 0.5) for eta in (0.01, 0.05, 0.1, 0.2, 0.4)]
        assert all(b > a for a, b in zip(bounds, bounds[1:]))


def test_doubling_subdivisions_leaves_oracles_unchanged():
    spec = specfun.QuadratureSpec()
    n, a = 2000, 0.5
    eps = n ** (-1 / a)
    for oracle in (lambda s: oracles.expected_degree_exact(n, eps, a, s),
                   lambda s: oracles.dust_expectation(n, eps, a, "exact", s),
                   lambda s: oracles.wedge_pair_probability(1e-4, a, s)):
        assert oracle(spec.doubled()) == pytest.approx(oracle(spec), rel=spec.rel_tol)


def test_tail_truncation_point_carries_safety_factor():
    c = oracles.mixing_constant(0.5)
    for tol in (1e-3, 1e-5):
        cut = oracles.tail_truncation_point(0.5, tol)
        assert 2 * c / (cut - 1) <= tol < 2 * c / (cut - 2)
    assert oracles.mixed_poisson_ccdf_summed(3, 0.5, tol=1e-3) == pytest.approx(
        oracles.mixed_poisson_ccdf(3, 0.5), abs=1e-3)
    with pytest.raises(ParameterError):
        oracles.mixed_poisson_ccdf_summed(3, 0.5, tol=1e-9, kmax=1000)
