"""
Gauss-Legendre rules and the semi-infinite integrator used by the kernels.

The semi-infinite integral over [0, inf) is mapped to (0, 1] with z = -c*log(u),
then integrated with Gauss-Legendre rules of doubling size until two successive
estimates agree.
"""

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.special import roots_legendre

from wishart_tw.errors import QuadratureError

logger = logging.getLogger(__name__)

MIN_NODES = 16
MAX_NODES = 2 ** 14


@lru_cache(maxsize=32)
def _legendre_reference(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre nodes and weights on [a, b]."""
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    t, w = _legendre_reference(int(n))
    half = 0.5 * (b - a)
    return half * t + 0.5 * (a + b), half * w


def _mapped_rule(n: int, scale: float) -> Tuple[np.ndarray, np.ndarray]:
    u, w = gauss_legendre(n, 0.0, 1.0)
    return -scale * np.log(u), w * scale / u


def semi_infinite_integral(
    f: Callable[[np.ndarray], np.ndarray],
    scale: float = 2.0,
    tol: float = 1e-9,
    min_nodes: int = MIN_NODES,
    max_nodes: int = MAX_NODES,
) -> Tuple[np.ndarray, float]:
    """
    Integrate f over [0, inf).

    ``f`` takes a 1-D array of abscissae and returns values along axis 0 (extra
    trailing axes are integrated independently). Returns ``(value, error_estimate)``;
    the estimate is the largest absolute change between the last two rules.

    Raises QuadratureError when ``max_nodes`` is reached without meeting ``tol``
    (absolute, or relative to the largest magnitude of the result).
    """
    n = min_nodes
    z, w = _mapped_rule(n, scale)
    previous = np.tensordot(w, np.asarray(f(z), dtype=float), axes=(0, 0))
    while True:
        n *= 2
        z, w = _mapped_rule(n, scale)
        current = np.tensordot(w, np.asarray(f(z), dtype=float), axes=(0, 0))
        error = float(np.max(np.abs(current - previous)))
        magnitude = float(np.max(np.abs(current))) if np.size(current) else 0.0
        logger.debug("semi-infinite rule n=%d error=%.3e", n, error)
        if not np.all(np.isfinite(current)):
            raise QuadratureError("non-finite integrand values", {"nodes": n})
        if error <= tol * max(1.0, magnitude):
            return current, error
        if n >= max_nodes:
            raise QuadratureError(
                "semi-infinite quadrature did not converge",
                {"nodes": n, "estimate": error, "tolerance": tol},
            )
        previous = current
