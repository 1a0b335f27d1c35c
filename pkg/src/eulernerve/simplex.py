"""Integration over the standard simplex.

Exact rational values for barycentric monomials (Dirichlet's formula) and
Gauss-Jacobi tensor rules mapped onto the simplex for everything else.
Barycentric coordinates are (t_0, ..., t_q) with t_0 = 1 - sum(t_i, i >= 1);
the measure is dt_1 ... dt_q on {t_i >= 0, sum <= 1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import roots_jacobi


def monomial_integral(exponents: Sequence[int]) -> Fraction:
    """Exact integral of prod_i t_i^{a_i} over the q-simplex, q = len(a) - 1.

    Dirichlet's formula: (prod a_i!) / (q + sum a_i)!.
    """
    a = list(exponents)
    if not a:
        raise ValueError("need at least one exponent (the t_0 exponent)")
    if any(int(x) != x or x < 0 for x in a):
        raise ValueError("exponents must be non-negative integers")
    q = len(a) - 1
    num = math.prod(math.factorial(int(x)) for x in a)
    den = math.factorial(q + int(sum(a)))
    return Fraction(num, den)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (barycentric, shape (m, q+1)) and weights for the q-simplex."""

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return float(sum(w * f(t) for t, w in zip(self.nodes, self.weights)))


@lru_cache(maxsize=None)
def _gauss_jacobi_01(order: int, alpha: int) -> tuple[np.ndarray, np.ndarray]:
    # nodes/weights for weight (1-u)^alpha on [0,1]
    x, w = roots_jacobi(order, alpha, 0.0)
    u = 0.5 * (x + 1.0)
    # (1-x)^alpha dx on [-1,1]  ->  (2(1-u))^alpha * 2 du
    w = w / (2.0 ** (alpha + 1))
    return u, w


@lru_cache(maxsize=None)
def quadrature_rule(q: int, order: int) -> QuadratureRule:
    """Tensor Gauss-Jacobi rule on the q-simplex via the Duffy-type map
    t_i = u_i * prod_{j<i}(1-u_j).

    Exact for barycentric polynomials of total degree <= 2*order - 1.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if order < 1:
        raise ValueError("order must be >= 1")
    axes = [_gauss_jacobi_01(order, q - i) for i in range(1, q + 1)]
    nodes = []
    weights = []

    def build(i: int, prefix_t: list[float], w: float, remaining: float):
        if i == q:
            t = np.empty(q + 1)
            t[1:] = prefix_t
            t[0] = max(remaining, 0.0)
            nodes.append(t)
            weights.append(w)
            return
        us, ws = axes[i]
        for u, wu in zip(us, ws):
            ti = u * remaining if i > 0 else u
            build(i + 1, prefix_t + [ti], w * wu, remaining * (1.0 - u))

    build(0, [], 1.0, 1.0)
    nodes_arr = np.array(nodes)
    weights_arr = np.array(weights)
    return QuadratureRule(dimension=q, nodes=nodes_arr, weights=weights_arr)
