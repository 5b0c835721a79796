"""
Special functions and quadrature for the analytic oracles.

Complete gamma, incomplete gamma and E1 come from scipy.special. The one
case scipy does not cover, the upper incomplete gamma at negative first
argument, is built on top of it with the recurrence

    Gamma(s; x) = (Gamma(s + 1; x) - x^s e^{-x}) / s

run downward from a start point in (0, 1].

Semi-infinite integrals use the change of variables t = lower / u, which
maps [lower, inf) onto (0, 1], and then QUADPACK's adaptive Gauss-Kronrod
rule via scipy.integrate.quad.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from scipy import integrate, special

from ..errors import ParameterError, QuadratureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision limit for adaptive quadrature"""
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ParameterError("quadrature tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise ParameterError("max_subdivisions must be at least 1")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tol, self.abs_tol, 2 * self.max_subdivisions)

    def loosened(self, factor: float) -> "QuadratureSpec":
        """Relative tolerance scaled by ``factor``, for the outer level of a nested integral"""
        return QuadratureSpec(self.rel_tol * float(factor), self.abs_tol, self.max_subdivisions)


DEFAULT_SPEC = QuadratureSpec()


def _is_pole(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma(x: float) -> float:
    """Complete gamma function; non-positive integers are rejected"""
    x = float(x)
    if _is_pole(x):
        raise ParameterError(f"gamma has a pole at {x}")
    return float(special.gamma(x))


def exp_integral_e1(x: float) -> float:
    """E1(x) = integral from x to inf of e^{-t}/t dt, for x > 0"""
    x = float(x)
    if not x > 0:
        raise ParameterError("exp_integral_e1 needs x > 0")
    return float(special.exp1(x))


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Non-regularized upper incomplete gamma, integral from x to inf of t^{s-1} e^{-t} dt"""
    s = float(s)
    x = float(x)
    if not x > 0:
        raise ParameterError("upper_incomplete_gamma needs x > 0")
    if s > 0:
        return float(special.gammaincc(s, x) * special.gamma(s))
    if s == 0:
        return exp_integral_e1(x)

    # start in (0, 1], or at 0 (E1) for negative integers
    steps = int(math.floor(-s)) + 1
    start = s + steps
    if start >= 1.0:  # s is a negative integer
        steps -= 1
        start = s + steps
    value = upper_incomplete_gamma(start, x)
    log_x = math.log(x)
    a = start
    for _ in range(steps):
        a -= 1.0
        value = (value - math.exp(a * log_x - x)) / a
    return value


def incomplete_gamma_series(s: float, x: float, terms: int = 7) -> float:
    """Small-x expansion Gamma(s) - sum_k (-1)^k x^{s+k} / (k! (s+k)), s not a pole"""
    if _is_pole(s):
        raise ParameterError(f"series undefined at pole s={s}")
    total = 0.0
    for k in range(terms):
        total += (-1) ** k * x ** (s + k) / (math.factorial(k) * (s + k))
    return gamma(s) - total


def _checked_quad(func, a, b, spec: QuadratureSpec, points=None, label="integral"):
    """Run quad and raise QuadratureError unless the tolerance is met.

    QUADPACK attaches a warning message whenever ier > 0. A result with a
    warning is still accepted when its error estimate is inside the
    requested tolerance; otherwise the subdivision limit is doubled once.
    """
    current = spec
    for attempt in range(2):
        kwargs = dict(epsabs=current.abs_tol, epsrel=current.rel_tol,
                      limit=current.max_subdivisions, full_output=1)
        if points is not None and len(points) > 0:
            kwargs["points"] = points
        out = integrate.quad(func, a, b, **kwargs)
        value, abserr = out[0], out[1]
        allowed = max(current.abs_tol, current.rel_tol * abs(value))
        if not math.isfinite(value):
            raise QuadratureError(f"{label}: non-finite result")
        if len(out) < 4 or abserr <= allowed:
            return value, abserr
        logger.debug("%s: quad warning (%s), abserr=%.3g allowed=%.3g, attempt %d",
                     label, out[3].splitlines()[0] if out[3] else "", abserr, allowed, attempt + 1)
        current = current.doubled()
    raise QuadratureError(f"{label}: no convergence (abserr={abserr:.3g}, allowed={allowed:.3g})")


def _to_unit(breakpoints: Optional[Iterable[float]], lower: float) -> Optional[list]:
    if not breakpoints:
        return None
    pts = sorted({lower / float(b) for b in breakpoints if b > lower})
    pts = [p for p in pts if 0.0 < p < 1.0]
    return pts or None


def integrate_1d(f: Callable[[float], float], lower: float,
                 spec: QuadratureSpec = DEFAULT_SPEC,
                 breakpoints: Optional[Sequence[float]] = None) -> float:
    """Integral of f over [lower, inf) via t = lower/u on (0, 1].

    ``breakpoints`` are points in t where the integrand changes scale
    (typically 1/epsilon); they are mapped to u and handed to QUADPACK.
    """
    lower = float(lower)
    if not lower > 0:
        raise ParameterError("integrate_1d needs lower > 0")

    def g(u):
        if u <= 0.0:
            return 0.0
        t = lower / u
        return f(t) * lower / (u * u)

    value, _ = _checked_quad(g, 0.0, 1.0, spec, points=_to_unit(breakpoints, lower),
                             label="integrate_1d")
    return value


def integrate_2d(f: Callable[[float, float], float], lower: float,
                 spec: QuadratureSpec = DEFAULT_SPEC,
                 outer_breakpoints: Optional[Sequence[float]] = None,
                 inner_breakpoints: Optional[Callable[[float], Sequence[float]]] = None,
                 inner_spec: Optional[QuadratureSpec] = None) -> float:
    """Integral of f(x, y) over [lower, inf)^2 as nested integrate_1d calls.

    ``inner_breakpoints`` maps the outer variable x to breakpoints in y.
    The outer integrand carries the inner quadrature error, so the outer
    level cannot converge below it; pass a tighter ``inner_spec`` when the
    outer tolerance is close to what the inner level achieves.
    """
    lower = float(lower)
    if not lower > 0:
        raise ParameterError("integrate_2d needs lower > 0")
    inner_spec = spec if inner_spec is None else inner_spec

    def outer(x):
        points = inner_breakpoints(x) if inner_breakpoints is not None else None
        return integrate_1d(lambda y: f(x, y), lower, inner_spec, points)

    return integrate_1d(outer, lower, spec, outer_breakpoints)


def integrate_unit(f: Callable[[float], float], spec: QuadratureSpec = DEFAULT_SPEC,
                   label: str = "integrate_unit") -> float:
    """Integral of f over (0, 1]; f may have an integrable singularity at 0"""
    value, _ = _checked_quad(f, 0.0, 1.0, spec, label=label)
    return value


def integrate_box(f: Callable[..., float], dims: int,
                  spec: QuadratureSpec = DEFAULT_SPEC,
                  inner_spec: Optional[QuadratureSpec] = None) -> float:
    """Integral of f over (0, 1]^dims, dims in {1, 2, 3}, by nested quad.

    The outermost level runs at ``spec``, deeper levels at ``inner_spec``.
    """
    if dims not in (1, 2, 3):
        raise ParameterError("integrate_box supports 1, 2 or 3 dimensions")
    inner_spec = spec if inner_spec is None else inner_spec

    def nest(prefix):
        depth = len(prefix)
        if depth == dims - 1:
            inner = lambda u: f(*prefix, u)
        else:
            inner = lambda u: nest(prefix + (u,))
        level = spec if depth == 0 else inner_spec
        value, _ = _checked_quad(inner, 0.0, 1.0, level, label=f"integrate_box[{depth}]")
        return value

    return nest(())
