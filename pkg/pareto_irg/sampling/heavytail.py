"""
Pareto fitness distribution.

P(W > w) = w^{-alpha} for w > 1 with alpha in (0, 1), so W has infinite
mean. Sampling is by CDF inversion of uniforms drawn from a PCG64 stream:
``Generator.random`` takes one 64-bit output per variate and keeps its top
53 bits, giving u in [0, 1).
"""

import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import special

from ..errors import ParameterError
from ..utils.limits import SimulationLimits

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class TailIndex:
    """Tail index alpha, strictly inside (0, 1)"""
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", SimulationLimits.validate_alpha(self.alpha))

    def __float__(self):
        return self.alpha


def as_alpha(alpha) -> float:
    """Accept a TailIndex or a bare float and return a validated float"""
    if isinstance(alpha, TailIndex):
        return alpha.alpha
    return SimulationLimits.validate_alpha(alpha)


@dataclass(frozen=True)
class WeightVector:
    """An i.i.d. Pareto sample (W_1, ..., W_n) with its provenance"""
    values: np.ndarray
    alpha: TailIndex
    seed: int
    n: int = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ParameterError("weights must be a non-empty 1-D array")
        if not np.all(values >= 1.0):
            raise ParameterError("every weight must be >= 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", int(values.size))
        if not isinstance(self.alpha, TailIndex):
            object.__setattr__(self, "alpha", TailIndex(self.alpha))

    def __len__(self):
        return self.n


def _scalar_or_array(values: np.ndarray, like) -> ArrayLike:
    return float(values) if np.ndim(like) == 0 else values


def pareto_quantile(u: ArrayLike, alpha) -> ArrayLike:
    """Inverse CDF: (1 - u)^{-1/alpha} for u in [0, 1)"""
    a = as_alpha(alpha)
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(~np.isfinite(u_arr)) or np.any(u_arr < 0.0) or np.any(u_arr >= 1.0):
        raise ParameterError("quantile level u must lie in [0, 1)")
    return _scalar_or_array(np.power(1.0 - u_arr, -1.0 / a), u)


def pareto_ccdf(w: ArrayLike, alpha) -> ArrayLike:
    """P(W > w): 1 on (0, 1], w^{-alpha} above"""
    a = as_alpha(alpha)
    w_arr = np.asarray(w, dtype=np.float64)
    if np.any(w_arr <= 0.0):
        raise ParameterError("pareto_ccdf needs w > 0")
    out = np.where(w_arr <= 1.0, 1.0, np.power(np.maximum(w_arr, 1.0), -a))
    return _scalar_or_array(out, w)


def pareto_cdf(w: ArrayLike, alpha) -> ArrayLike:
    a = as_alpha(alpha)
    w_arr = np.asarray(w, dtype=np.float64)
    out = np.where(w_arr <= 1.0, 0.0, -np.expm1(-a * np.log(np.maximum(w_arr, 1.0))))
    return _scalar_or_array(out, w)


def pareto_pdf(w: ArrayLike, alpha) -> ArrayLike:
    a = as_alpha(alpha)
    w_arr = np.asarray(w, dtype=np.float64)
    out = np.where(w_arr < 1.0, 0.0, a * np.power(np.maximum(w_arr, 1.0), -a - 1.0))
    return _scalar_or_array(out, w)


def sample_weights(n: int, alpha, seed: int) -> WeightVector:
    """Draw n i.i.d. Pareto(alpha) weights from the stream PCG64(seed)"""
    n = SimulationLimits.validate_nodes(n)
    seed = SimulationLimits.validate_seed(seed)
    tail = alpha if isinstance(alpha, TailIndex) else TailIndex(alpha)
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(n)
    values = np.power(1.0 - u, -1.0 / tail.alpha)
    logger.debug("sampled %d weights (alpha=%s, seed=%d, max=%.3g)", n, tail.alpha, seed, values.max())
    return WeightVector(values=values, alpha=tail, seed=seed)


def product_ccdf(x: ArrayLike, alpha, mode: str = "exact") -> ArrayLike:
    """P(W_1 W_2 > x) for x >= 1.

    log W is Exp(alpha), so log(W_1 W_2) is Gamma(2, 1/alpha) and the tail is
    x^{-alpha}(1 + alpha log x). ``mode="asymptotic"`` returns the leading
    term alpha x^{-alpha} log x instead.
    """
    a = as_alpha(alpha)
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr < 1.0):
        raise ParameterError("product_ccdf needs x >= 1")
    log_x = np.log(x_arr)
    if mode == "exact":
        out = np.power(x_arr, -a) * (1.0 + a * log_x)
    elif mode == "asymptotic":
        out = a * np.power(x_arr, -a) * log_x
    else:
        raise ParameterError(f"unknown product_ccdf mode {mode!r}")
    return _scalar_or_array(out, x)


def product_pdf(x: ArrayLike, alpha) -> ArrayLike:
    """Density of W_1 W_2: alpha^2 x^{-alpha-1} log x on x >= 1"""
    a = as_alpha(alpha)
    x_arr = np.asarray(x, dtype=np.float64)
    safe = np.maximum(x_arr, 1.0)
    out = np.where(x_arr < 1.0, 0.0, a * a * np.power(safe, -a - 1.0) * np.log(safe))
    return _scalar_or_array(out, x)


def sum_ccdf_asymptotic(x: ArrayLike, alpha, cap: bool = True) -> ArrayLike:
    """Subexponential approximation P(W_1 + W_2 > x) ~ 2 x^{-alpha}, x >= 2.

    Only the leading term; with ``cap`` the value is clipped to 1 so it can be
    reported as a probability.
    """
    a = as_alpha(alpha)
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr < 2.0):
        raise ParameterError("sum_ccdf_asymptotic needs x >= 2")
    out = 2.0 * np.power(x_arr, -a)
    if cap:
        out = np.minimum(out, 1.0)
    return _scalar_or_array(out, x)


def laplace_complement(lam: ArrayLike, alpha) -> ArrayLike:
    """1 - E[exp(-lam W)] in closed form.

    Equals -expm1(-lam) + lam^alpha Gamma(1-alpha) Q(1-alpha, lam) with Q the
    regularized upper incomplete gamma. Both terms are non-negative so there
    is no cancellation for small lam, where the value behaves like
    Gamma(1-alpha) lam^alpha.
    """
    a = as_alpha(alpha)
    lam_arr = np.asarray(lam, dtype=np.float64)
    if np.any(lam_arr < 0.0):
        raise ParameterError("laplace_complement needs lam >= 0")
    pos = np.maximum(lam_arr, np.finfo(np.float64).tiny)
    out = -np.expm1(-lam_arr) + np.power(pos, a) * special.gamma(1.0 - a) * special.gammaincc(1.0 - a, pos)
    out = np.where(lam_arr == 0.0, 0.0, out)
    return _scalar_or_array(out, lam)
