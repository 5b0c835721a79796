"""Special functions, quadrature and the analytic oracles built on them"""

from . import oracles, specfun

__all__ = ["specfun", "oracles"]
