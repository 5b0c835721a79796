"""
Analytic predictions for every statistic the simulator measures.

Finite-n "exact" values reduce the weight integrals analytically and then
use quadrature (never Monte Carlo), so oracle error and simulation error are
independent. Throughout c = Gamma(1 - alpha) and

    h(lam) = 1 - E[exp(-lam W)]

is the closed-form Laplace complement from sampling.heavytail.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy import special

from ..errors import ParameterError
from ..sampling.heavytail import as_alpha
from ..utils.limits import SimulationLimits
from . import specfun
from .specfun import DEFAULT_SPEC, QuadratureSpec

logger = logging.getLogger(__name__)

WEDGE_MODES = ("exact-factorized", "asymptotic", "true-domain")
DUST_MODES = ("exact", "factorized")

# outer/inner relative tolerance ratio for nested quadrature
NESTED_OUTER_SLACK = 1e3


def mixing_constant(alpha) -> float:
    """c = Gamma(1 - alpha)"""
    return specfun.gamma(1.0 - as_alpha(alpha))


def _check_n(n) -> int:
    return SimulationLimits.validate_nodes(n)


def _check_eps(epsilon, below_one=False) -> float:
    eps = SimulationLimits.validate_positive(epsilon, "epsilon")
    if below_one and eps >= 1.0:
        raise ParameterError(f"asymptotic formulas need epsilon in (0, 1), got {eps}")
    return eps


def _scale_points(eps: float, *extra: float) -> List[float]:
    """Decade breakpoints from 10 up to 100/eps, plus any extra scales"""
    if eps >= 1.0 and not extra:
        return []
    top = max([1.0 / eps] + list(extra)) * 100.0
    points = [10.0 ** j for j in range(1, int(math.log10(top)) + 1)]
    points.extend(p for p in [1.0 / eps, *extra] if p > 1.0)
    return sorted(set(points))


def _h(lam: float, a: float, c: float) -> float:
    # scalar laplace_complement for quadrature integrands
    if lam <= 0.0:
        return 0.0
    return -math.expm1(-lam) + lam ** a * c * special.gammaincc(1.0 - a, lam)


def _sum_excess(x: float, y: float, a: float) -> float:
    # x^a + y^a - (x+y)^a >= 0 without cancellation when x >> y
    big, small = (x, y) if x >= y else (y, x)
    return small ** a - big ** a * math.expm1(a * math.log1p(small / big))


# ---------------------------------------------------------------------------
# Degrees
# ---------------------------------------------------------------------------

def product_laplace_complement(epsilon, alpha, method: str = "density",
                               spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """1 - E[exp(-eps W1 W2)], the edge probability averaged over both weights.

    ``density`` integrates -expm1(-eps t) against the density of W1 W2;
    ``conditional`` integrates h(eps x) against the density of one weight.
    """
    a = as_alpha(alpha)
    eps = _check_eps(epsilon)
    if method == "density":
        f = lambda t: -math.expm1(-eps * t) * a * a * t ** (-a - 1.0) * math.log(t)
    elif method == "conditional":
        c = mixing_constant(a)
        f = lambda x: _h(eps * x, a, c) * a * x ** (-a - 1.0)
    else:
        raise ParameterError(f"unknown method {method!r}")
    return specfun.integrate_1d(f, 1.0, spec, _scale_points(eps))


def expected_degree_exact(n, epsilon, alpha, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """(n-1)(1 - E[exp(-eps W1 W2)]), the complement computed directly"""
    n = _check_n(n)
    if n == 1:
        return 0.0
    return (n - 1) * product_laplace_complement(epsilon, alpha, "density", spec)


def degree_correction_constant(alpha, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Second-order constant J in E[D] = (n-1) alpha eps^alpha (c log(1/eps) + J + o(1)).

    J = int_0^1 y^{-a-1} (h(y) - c y^a) dy + int_1^inf y^{-a-1} h(y) dy.
    """
    a = as_alpha(alpha)
    c = mixing_constant(a)

    def near(y):
        if y <= 0.0:
            return 0.0
        # h(y) - c y^a = (1 - e^{-y}) - y^a * lower_gamma(1-a, y)
        return y ** (-a - 1.0) * (-math.expm1(-y) - y ** a * c * special.gammainc(1.0 - a, y))

    head = specfun.integrate_unit(near, spec, label="degree_correction_head")
    tail = specfun.integrate_1d(lambda y: y ** (-a - 1.0) * _h(y, a, c), 1.0, spec, [10.0, 100.0])
    return head + tail


def expected_degree_asymptotic(n, epsilon, alpha, order: int = 1,
                               spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """(n-1) c alpha eps^alpha log(1/eps); ``order=2`` adds the constant term J.

    ``order=3`` also adds alpha eps^{1-alpha} / (1-alpha)^2, the leading part
    of the weight integral below eps that J leaves out (h(y) - c y^alpha is
    -alpha y/(1-alpha) near 0). It is what limits the second-order ratio:
    at alpha = 0.7 the error shrinks only like eps^{0.3}.
    """
    n = _check_n(n)
    eps = _check_eps(epsilon, below_one=True)
    a = as_alpha(alpha)
    c = mixing_constant(a)
    if order not in (1, 2, 3):
        raise ParameterError("order must be 1, 2 or 3")
    bracket = c * math.log(1.0 / eps)
    if order >= 2:
        bracket += degree_correction_constant(a, spec)
    if order == 3:
        bracket += a * eps ** (1.0 - a) / (1.0 - a) ** 2
    return (n - 1) * a * eps ** a * bracket


# ---------------------------------------------------------------------------
# Limiting degree law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixedPoissonLaw:
    """Poisson(Y) with Y = c W^alpha, i.e. Y Pareto(1) on (c, inf)"""
    alpha: float
    c: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        object.__setattr__(self, "c", mixing_constant(self.alpha))

    def pmf(self, k: int) -> float:
        return mixed_poisson_pmf(k, self.alpha)

    def ccdf(self, k: int) -> float:
        return mixed_poisson_ccdf(k, self.alpha)

    def pgf(self, t: float) -> float:
        return mixed_poisson_pgf(t, self.alpha)

    def pmf_array(self, kmax: int) -> np.ndarray:
        """pmf(0..kmax-1), vectorized"""
        k = np.arange(kmax, dtype=np.float64)
        out = np.empty(kmax)
        c = self.c
        e1 = special.exp1(c)
        out[0] = math.exp(-c) - c * e1
        if kmax > 1:
            out[1] = c * e1
        if kmax > 2:
            kk = k[2:]
            out[2:] = c * special.gammaincc(kk - 1.0, c) / (kk * (kk - 1.0))
        return out


def _check_count(k) -> int:
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ParameterError(f"k must be a non-negative integer, got {k!r}")
    return int(k)


def mixed_poisson_pmf(k, alpha) -> float:
    """P(D = k) = (c / k!) Gamma(k-1; c); the k = 0, 1 cases go through E1"""
    k = _check_count(k)
    c = mixing_constant(alpha)
    if k == 0:
        return math.exp(-c) - c * specfun.exp_integral_e1(c)
    if k == 1:
        return c * specfun.exp_integral_e1(c)
    return c * float(special.gammaincc(k - 1, c)) / (k * (k - 1))


def mixed_poisson_ccdf(k, alpha) -> float:
    """P(D >= k) = P(k, c) + c Q(k-1, c)/(k-1) for k >= 2 (P, Q regularized)"""
    k = _check_count(k)
    c = mixing_constant(alpha)
    if k == 0:
        return 1.0
    if k == 1:
        return 1.0 - mixed_poisson_pmf(0, alpha)
    return float(special.gammainc(k, c)) + c * float(special.gammaincc(k - 1, c)) / (k - 1)


TAIL_SAFETY = 2.0


def tail_truncation_point(alpha, tol: float) -> int:
    """Smallest K with TAIL_SAFETY * c/(K-1) <= tol, using P(D >= K) <= c/(K-1)"""
    tol = SimulationLimits.validate_positive(tol, "tol")
    c = mixing_constant(alpha)
    return int(math.ceil(TAIL_SAFETY * c / tol)) + 1


def mixed_poisson_ccdf_summed(k, alpha, tol: float = 1e-5, kmax: int = 10_000_000) -> float:
    """P(D >= k) by summing the pmf below K = tail_truncation_point(alpha, tol)
    and closing the tail with c/(K-1)"""
    k = _check_count(k)
    law = MixedPoissonLaw(alpha)
    cut = max(tail_truncation_point(law.alpha, tol), k + 1)
    if cut > kmax:
        raise ParameterError(f"tol={tol} needs {cut} pmf terms, above kmax={kmax}")
    pmf = law.pmf_array(cut)
    closure = law.c / (cut - 1)
    return float(pmf[k:].sum()) + closure


def mixed_poisson_pgf(t, alpha) -> float:
    """E[t^D] = e^{-lam c} - lam c E1(lam c), lam = 1 - t"""
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise ParameterError("pgf argument must lie in [0, 1]")
    c = mixing_constant(alpha)
    z = (1.0 - t) * c
    if z == 0.0:
        return 1.0
    return math.exp(-z) - z * specfun.exp_integral_e1(z)


def _check_unit(value, name) -> float:
    value = float(value)
    if not (0.0 < value <= 1.0):
        raise ParameterError(f"{name} must lie in (0, 1], got {value}")
    return value


def joint_pgf_limit(t, s, alpha, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Limit of E[t^{D(1)} s^{D(2)}] as a 2-D integral over the two weights"""
    t = _check_unit(t, "t")
    s = _check_unit(s, "s")
    a = as_alpha(alpha)
    c = mixing_constant(a)
    if t == 1.0 and s == 1.0:
        return 1.0
    lt, ls = 1.0 - t, 1.0 - s

    def f(x, y):
        xa, ya = x ** a, y ** a
        expo = c * (lt * xa + ls * ya - lt * ls * _sum_excess(x, y, a))
        return math.exp(-expo) * a * a * (x * y) ** (-a - 1.0)

    return specfun.integrate_2d(f, 1.0, spec)


def joint_pgf_product(t, s, alpha) -> float:
    """Independent baseline E[exp(-c(1-t)W^a)] E[exp(-c(1-s)W^a)]"""
    return mixed_poisson_pgf(_check_unit(t, "t"), alpha) * mixed_poisson_pgf(_check_unit(s, "s"), alpha)


def joint_pgf_gap(t, s, alpha, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return joint_pgf_limit(t, s, alpha, spec) - joint_pgf_product(t, s, alpha)


def _pair_series(z: float) -> float:
    # sum_{k>=2} z^k / (k (k-1)) for |z| < 1
    return (1.0 - z) * math.log1p(-z) + z


def joint_pgf_gap_bound(eta, gamma_, alpha) -> float:
    """Explicit upper bound on |joint - product| at t = 1 - eta, s = 1 - gamma_"""
    for name, value in (("eta", eta), ("gamma_", gamma_)):
        if not (0.0 < float(value) < 0.5):
            raise ParameterError(f"{name} must lie in (0, 1/2), got {value}")
    eta, gamma_ = float(eta), float(gamma_)
    c = mixing_constant(alpha)
    logs = eta * gamma_ * (math.log1p(1.0 / (c * eta)) + math.log1p(1.0 / (c * gamma_)))
    series = 0.5 * (eta * _pair_series(2.0 * gamma_) + gamma_ * _pair_series(2.0 * eta))
    return c * (logs + series)


# ---------------------------------------------------------------------------
# Wedges and triangles
# ---------------------------------------------------------------------------

def _factorized_bracket(eps: float, a: float) -> float:
    # 2/alpha - eps^{alpha/2} Gamma(-alpha/2; eps)
    return 2.0 / a - eps ** (a / 2.0) * specfun.upper_incomplete_gamma(-a / 2.0, eps)


def wedge_pair_probability(epsilon, alpha, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E[p_ij p_ik] = E_x[h(eps x)^2] over the true weight domain"""
    a = as_alpha(alpha)
    eps = _check_eps(epsilon)
    c = mixing_constant(a)
    f = lambda x: _h(eps * x, a, c) ** 2 * a * x ** (-a - 1.0)
    return specfun.integrate_1d(f, 1.0, spec, _scale_points(eps))


def triangle_probability(epsilon, alpha, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E[p_ij p_ik p_jk]; the weight of the closing vertex is integrated in closed form.

    The inner integral runs at ``spec``; the outer one at a relative
    tolerance NESTED_OUTER_SLACK times looser, since its integrand carries
    the inner quadrature error.
    """
    a = as_alpha(alpha)
    eps = _check_eps(epsilon)
    c = mixing_constant(a)

    def f(x, y):
        closing = _h(eps * x, a, c) + _h(eps * y, a, c) - _h(eps * (x + y), a, c)
        return -math.expm1(-eps * x * y) * closing * a * a * (x * y) ** (-a - 1.0)

    # 1/eps is an outer breakpoint, so the inner point 1/(eps x) leaves the
    # range exactly at a boundary of the outer partition
    outer = _scale_points(eps, eps ** -0.5)
    inner = lambda x: _scale_points(eps, 1.0 / (eps * x))
    return specfun.integrate_2d(f, 1.0, spec.loosened(NESTED_OUTER_SLACK), outer, inner,
                                inner_spec=spec)


def expected_wedges(n, epsilon, alpha, mode: str = "exact-factorized",
                    spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Expected wedges at a node, half-normalized (C(D, 2)) convention"""
    n = _check_n(n)
    a = as_alpha(alpha)
    if mode not in WEDGE_MODES:
        raise ParameterError(f"mode must be one of {WEDGE_MODES}")
    eps = _check_eps(epsilon, below_one=(mode != "true-domain"))
    pairs = (n - 1) * (n - 2) / 2.0
    if mode == "exact-factorized":
        return pairs * a * a * _factorized_bracket(eps, a) ** 2
    if mode == "asymptotic":
        return wedge_limit_constant(a, "factorized") / 2.0 * eps ** a * n * n
    return pairs * wedge_pair_probability(eps, a, spec)


def wedge_limit_constant(alpha, mode: str = "factorized",
                         spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Limit of E[p_ij p_ik] / eps^alpha.

    ``factorized``: alpha^2 Gamma(-alpha/2)^2, from reducing the weight
    integral on a box.  ``true``: c E[W1^a + W2^a - (W1+W2)^a], from the
    full weight domain.
    """
    a = as_alpha(alpha)
    if mode == "factorized":
        return a * a * specfun.gamma(-a / 2.0) ** 2
    if mode != "true":
        raise ParameterError("mode must be 'factorized' or 'true'")
    c = mixing_constant(a)

    def f(x, y):
        return _sum_excess(x, y, a) * a * a * (x * y) ** (-a - 1.0)

    return c * specfun.integrate_2d(f, 1.0, spec)


def expected_triangles(n, epsilon, alpha, mode: str = "exact-factorized",
                       spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Expected triangle value Delta_n(i) at a node (triangles containing i over 3)"""
    n = _check_n(n)
    a = as_alpha(alpha)
    if mode not in WEDGE_MODES:
        raise ParameterError(f"mode must be one of {WEDGE_MODES}")
    eps = _check_eps(epsilon, below_one=(mode != "true-domain"))
    if mode == "exact-factorized":
        return (n - 1) * (n - 2) * a ** 3 / 12.0 * _factorized_bracket(eps, a) ** 3
    if mode == "asymptotic":
        return a ** 3 / 12.0 * triangle_limit_constant(a) * eps ** (1.5 * a) * n * n
    return (n - 1) * (n - 2) / 6.0 * triangle_probability(eps, a, spec)


def triangle_limit_constant(alpha) -> float:
    """-Gamma(-alpha/2)^3, positive because Gamma(-alpha/2) < 0"""
    a = as_alpha(alpha)
    return -specfun.gamma(-a / 2.0) ** 3


# ---------------------------------------------------------------------------
# Dust
# ---------------------------------------------------------------------------

def dust_thresholds(alpha) -> Tuple[float, float]:
    """(k1*, k2*) = (c^{-1/a}, (c (2 - 2^a))^{-1/a})"""
    a = as_alpha(alpha)
    c = mixing_constant(a)
    return c ** (-1.0 / a), (c * (2.0 - 2.0 ** a)) ** (-1.0 / a)


def isolated_probability_limit(k, alpha) -> float:
    """Critical-scale limit of P(node isolated): e^{-y} - y E1(y), y = c k^a"""
    a = as_alpha(alpha)
    k = SimulationLimits.validate_positive(k, "k")
    y = mixing_constant(a) * k ** a
    return math.exp(-y) - y * specfun.exp_integral_e1(y)


def dust_expectation(n, epsilon, alpha, mode: str = "exact",
                     spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E[N0], the expected number of isolated nodes.

    ``exact`` conditions on the isolated node's own weight,
    n E_x[(1 - h(eps x))^{n-1}]. ``factorized`` treats the n-1 absent edges
    as independent, n (E[exp(-eps W1 W2)])^{n-1}.
    """
    n = _check_n(n)
    a = as_alpha(alpha)
    eps = _check_eps(epsilon)
    if mode not in DUST_MODES:
        raise ParameterError(f"mode must be one of {DUST_MODES}")
    if n == 1:
        return 1.0
    if mode == "factorized":
        q = product_laplace_complement(eps, a, "density", spec)
        return n * math.exp((n - 1) * math.log1p(-q))

    c = mixing_constant(a)

    def f(x):
        h = _h(eps * x, a, c)
        if h >= 1.0:
            return 0.0
        return math.exp((n - 1) * math.log1p(-h)) * a * x ** (-a - 1.0)

    return n * specfun.integrate_1d(f, 1.0, spec, _scale_points(eps))


# ---------------------------------------------------------------------------
# Tauberian consistency
# ---------------------------------------------------------------------------

@dataclass
class KaramataReport:
    alpha: float
    target: str
    rows: List[dict]
    monotone: bool
    passed: bool

    def ratios(self) -> List[float]:
        return [row["ratio"] for row in self.rows]


def karamata_check(alpha, epsilon_grid: Sequence[float], target: str = "weight",
                   tolerance: float = 1e-2, spec: QuadratureSpec = DEFAULT_SPEC) -> KaramataReport:
    """Compare 1 - E[exp(-eps X)] by quadrature against its small-eps form.

    X = W is compared with c eps^a and X = W1 W2 with c a eps^a log(1/eps).
    The check passes when |ratio - 1| shrinks monotonically along the grid
    and the last ratio is within ``tolerance``. Rows far from 1 (more than
    ten tolerances) are flagged ``non_asymptotic``.
    """
    a = as_alpha(alpha)
    c = mixing_constant(a)
    grid = [float(e) for e in epsilon_grid]
    if not grid or any(e <= 0 for e in grid):
        raise ParameterError("epsilon grid must be non-empty and positive")
    if any(b >= a_ for a_, b in zip(grid, grid[1:])):
        raise ParameterError("epsilon grid must be strictly decreasing")

    rows = []
    for eps in grid:
        if target == "weight":
            f = lambda x, e=eps: -math.expm1(-e * x) * a * x ** (-a - 1.0)
            value = specfun.integrate_1d(f, 1.0, spec, _scale_points(eps))
            reference = c * eps ** a
        elif target == "product":
            value = product_laplace_complement(eps, a, "density", spec)
            reference = c * a * eps ** a * math.log(1.0 / eps) if eps < 1.0 else float("nan")
        else:
            raise ParameterError("target must be 'weight' or 'product'")
        ratio = value / reference if reference and math.isfinite(reference) else float("nan")
        rows.append({
            "epsilon": eps,
            "value": value,
            "reference": reference,
            "ratio": ratio,
            "non_asymptotic": not math.isfinite(ratio) or abs(ratio - 1.0) > 10 * tolerance,
        })

    errors = [abs(r["ratio"] - 1.0) for r in rows if math.isfinite(r["ratio"])]
    monotone = len(errors) == len(rows) and all(b <= a_ for a_, b in zip(errors, errors[1:]))
    passed = monotone and bool(errors) and errors[-1] <= tolerance
    logger.debug("karamata %s alpha=%s ratios=%s", target, a, [r["ratio"] for r in rows])
    return KaramataReport(alpha=a, target=target, rows=rows, monotone=monotone, passed=passed)
