import logging
from functools import lru_cache
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_NODES = 64
MIN_NODES = 16


@lru_cache(maxsize=32)
def unit_interval_rule(nodes: int = DEFAULT_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights mapped to (0, 1).

    The rule is open: t = 0 and t = 1 are never sampled.
    """
    if nodes < 1:
        raise ValueError(f"Quadrature needs at least one node, got {nodes}")
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1.0)
    weights = 0.5 * w
    t.setflags(write=False)
    weights.setflags(write=False)
    logger.debug(f"Built {nodes}-node Gauss-Legendre rule on (0,1)")
    return t, weights


def check_nodes(nodes: int):
    if nodes < MIN_NODES:
        raise ValueError(f"At least {MIN_NODES} quadrature nodes are required, got {nodes}")


def integrate_unit(fn: Callable[[np.ndarray], np.ndarray], nodes: int = DEFAULT_NODES) -> np.ndarray:
    """∫₀¹ fn(t) dt for a vectorised integrand.

    fn receives the node vector of shape (m,) and returns either (m,) or (m, P);
    the result has shape () or (P,).

    Raises:
        ValueError: if any integrand sample is not finite
    """
    t, weights = unit_interval_rule(nodes)
    samples = np.asarray(fn(t))
    if not np.all(np.isfinite(samples)):
        raise ValueError("Non-finite integrand sample in quadrature")
    return np.tensordot(weights, samples, axes=(0, 0))
