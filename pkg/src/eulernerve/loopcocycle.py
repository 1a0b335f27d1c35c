"""A 2-cocycle on the loop algebra of so(4) from the Euler cochain.

Loops are trigonometric polynomials theta -> so(4) of period 1.  The cocycle

    alpha(xi1, xi2) = (-1/(128 pi^2)) int_0^1 ( pf(xi1', xi2) - pf(xi2', xi1) ) dtheta

pairs the derivative of one loop against the other through the polarized
Pfaffian contraction pf(X, Y) = sum_{tau in S_4} sgn(tau) X_{tau(1)tau(2)}
Y_{tau(3)tau(4)}.  The same value is recovered by antisymmetrized mixed
partials of functionals obtained by contracting the level-1 and level-2 Euler
components over loop-group paths exp(y xi(theta)).

Normalization note: the loop functionals evaluate the level-2 component in
the normalized-alternation convention on the single canonical word, which is
1/4 of the shuffle-convention pair form used by the cocycle verification
(1/2 from the wedge normalization, 1/2 from the word pair); the level-1
functional analogously carries 1/6.  The relation is pinned by a unit test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .euler import builtin_cocycle, pfaffian_contraction
from .matgroup import nerve_point, skew_project, tangent_frame
from .simplex import quadrature_rule
from .transgression import ContractionKind, contraction

LEVEL2_LOOP_SCALE = 0.25
LEVEL1_LOOP_SCALE = 1.0 / 6.0


# ---------------------------------------------------------------------------
# loop algebra elements


@dataclass(frozen=True)
class LoopElement:
    """xi(theta) = c0 + sum_k (a_k cos(2 pi k theta) + b_k sin(2 pi k theta)),
    with skew matrix coefficients."""

    c0: np.ndarray
    cos_coeffs: tuple[np.ndarray, ...] = ()
    sin_coeffs: tuple[np.ndarray, ...] = ()

    @property
    def max_frequency(self) -> int:
        return len(self.cos_coeffs)

    @property
    def n(self) -> int:
        return self.c0.shape[0]

    def value(self, theta: float) -> np.ndarray:
        out = np.array(self.c0)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = 2.0 * np.pi * k * theta
            out = out + a * np.cos(w) + b * np.sin(w)
        return out

    def derivative(self) -> "LoopElement":
        cos_c = []
        sin_c = []
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = 2.0 * np.pi * k
            cos_c.append(w * b)
            sin_c.append(-w * a)
        return LoopElement(np.zeros_like(self.c0), tuple(cos_c), tuple(sin_c))

    def to_json(self) -> dict:
        from .matgroup import matrix_to_json

        return {
            "K": self.max_frequency,
            "c0": matrix_to_json(self.c0),
            "a": [matrix_to_json(a) for a in self.cos_coeffs],
            "b": [matrix_to_json(b) for b in self.sin_coeffs],
        }


def loop_element(c0, cos_coeffs=(), sin_coeffs=()) -> LoopElement:
    c0 = skew_project(np.asarray(c0, dtype=float))
    cos_t = tuple(skew_project(np.asarray(a, dtype=float)) for a in cos_coeffs)
    sin_t = tuple(skew_project(np.asarray(b, dtype=float)) for b in sin_coeffs)
    if len(cos_t) != len(sin_t):
        raise ValueError("cos and sin coefficient lists must have equal length")
    return LoopElement(c0, cos_t, sin_t)


def loop_from_json(data: dict) -> LoopElement:
    from .matgroup import matrix_from_json

    return loop_element(
        matrix_from_json(data["c0"]),
        [matrix_from_json(a) for a in data.get("a", [])],
        [matrix_from_json(b) for b in data.get("b", [])],
    )


def random_loop(
    n: int, max_freq: int, rng: np.random.Generator, norm: float = 1.0
) -> LoopElement:
    from .matgroup import random_skew

    return LoopElement(
        random_skew(n, rng, norm=norm),
        tuple(random_skew(n, rng, norm=norm) for _ in range(max_freq)),
        tuple(random_skew(n, rng, norm=norm) for _ in range(max_freq)),
    )


def loop_bracket(x: LoopElement, y: LoopElement) -> LoopElement:
    """Pointwise bracket, computed exactly on Fourier coefficients via
    product-to-sum identities."""
    kx, ky = x.max_frequency, y.max_frequency
    kout = kx + ky
    n = x.n
    c0 = np.zeros((n, n))
    cos_c = [np.zeros((n, n)) for _ in range(kout)]
    sin_c = [np.zeros((n, n)) for _ in range(kout)]

    def terms(elem: LoopElement):
        yield 0, "c", elem.c0
        for k, (a, b) in enumerate(zip(elem.cos_coeffs, elem.sin_coeffs), start=1):
            yield k, "c", a
            yield k, "s", b

    def add(freq: int, kind: str, mat: np.ndarray):
        nonlocal c0
        if freq == 0:
            if kind == "c":
                c0 = c0 + mat
            # sin(0) == 0: drop
            return
        if kind == "c":
            cos_c[freq - 1] += mat
        else:
            sin_c[freq - 1] += mat

    for ka, kind_a, ma in terms(x):
        for kb, kind_b, mb in terms(y):
            com = ma @ mb - mb @ ma
            s, d = ka + kb, ka - kb
            if kind_a == "c" and kind_b == "c":
                # cos cos = (cos(d) + cos(s)) / 2
                add(abs(d), "c", 0.5 * com)
                add(s, "c", 0.5 * com)
            elif kind_a == "s" and kind_b == "s":
                # sin sin = (cos(d) - cos(s)) / 2
                add(abs(d), "c", 0.5 * com)
                add(s, "c", -0.5 * com)
            elif kind_a == "s" and kind_b == "c":
                # sin cos = (sin(s) + sin(d)) / 2
                add(s, "s", 0.5 * com)
                sign = 1.0 if d >= 0 else -1.0
                add(abs(d), "s", sign * 0.5 * com)
            else:
                # cos sin = (sin(s) - sin(d)) / 2
                add(s, "s", 0.5 * com)
                sign = 1.0 if d >= 0 else -1.0
                add(abs(d), "s", -sign * 0.5 * com)
    return LoopElement(c0, tuple(cos_c), tuple(sin_c))


# ---------------------------------------------------------------------------
# the cocycle


def pf_pairing(x: np.ndarray, y: np.ndarray) -> float:
    """Polarized Pfaffian pairing on so(4):
    sum_{tau in S_4} sgn(tau) x_{tau(1)tau(2)} y_{tau(3)tau(4)}."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (4, 4) or y.shape != (4, 4):
        raise ValueError("pf_pairing expects 4 x 4 matrices")
    return pfaffian_contraction([x, y])


def loop_cocycle(xi1: LoopElement, xi2: LoopElement, nodes: int | None = None) -> float:
    """alpha(xi1, xi2); trapezoid quadrature exact for trig polynomials."""
    if nodes is None:
        nodes = 4 * (xi1.max_frequency + xi2.max_frequency) + 8
    d1 = xi1.derivative()
    d2 = xi2.derivative()
    total = 0.0
    for i in range(nodes):
        theta = i / nodes
        total += pf_pairing(d1.value(theta), xi2.value(theta))
        total -= pf_pairing(d2.value(theta), xi1.value(theta))
    integral = total / nodes
    return float(-integral / (128.0 * np.pi**2))


def cocycle_residual(x1: LoopElement, x2: LoopElement, x3: LoopElement) -> float:
    """Cyclic sum alpha([x1,x2], x3) + alpha([x2,x3], x1) + alpha([x3,x1], x2)."""
    return (
        loop_cocycle(loop_bracket(x1, x2), x3)
        + loop_cocycle(loop_bracket(x2, x3), x1)
        + loop_cocycle(loop_bracket(x3, x1), x2)
    )


# ---------------------------------------------------------------------------
# loop functionals from the Euler components


def _loop_tangent(h_of, theta: float, step: float = 1e-5) -> np.ndarray:
    """Left-trivialized theta-derivative of a group-valued curve by central
    differences."""
    base = h_of(theta)
    diff = (h_of(theta + step) - h_of(theta - step)) / (2.0 * step)
    return skew_project(base.T @ diff)


def level2_loop_functional(
    y1: float,
    xi1: LoopElement,
    y2: float,
    xi2: LoopElement,
    *,
    theta_nodes: int = 64,
    t_order: int = 8,
) -> float:
    """Integral over S^1 x Delta^1 of the pulled-back level-2 component along
    (theta, t) -> (exp(y1 xi1(theta)), exp(t y2 xi2(theta))).

    The t-direction tangent is exact ((0, y2 xi2(theta)) in left
    trivialization); the theta tangents use central differences.  The
    component is evaluated in the loop normalization (see module docstring).
    """
    e22 = builtin_cocycle(4).components[(2, 2)]
    rule = quadrature_rule(1, t_order)
    total = 0.0
    for i in range(theta_nodes):
        theta = i / theta_nodes
        z_of = lambda th: y2 * xi2.value(th)
        h1_of = lambda th: expm(y1 * xi1.value(th))
        for node, w in zip(rule.nodes, rule.weights):
            t1 = node[1]
            h2_of = lambda th: expm(t1 * z_of(th))
            h1 = h1_of(theta)
            h2 = h2_of(theta)
            point = nerve_point([h1, h2])
            v_theta = tangent_frame(
                [_loop_tangent(h1_of, theta), _loop_tangent(h2_of, theta)]
            )
            v_t = tangent_frame([np.zeros((4, 4)), z_of(theta)])
            val = e22.fn(point, (v_theta, v_t))
            total += w * val / theta_nodes
    return float(LEVEL2_LOOP_SCALE * total)


def level1_loop_functional(
    y1: float,
    xi1: LoopElement,
    y2: float,
    xi2: LoopElement,
    *,
    theta_nodes: int = 64,
    t_order: int = 8,
    kind: ContractionKind = ContractionKind.EXPLICIT,
) -> float:
    """Integral over S^1 x Delta^2 of the level-1 component pulled back along
    (theta, t) -> sigma_2(t; exp(y1 xi1(theta)), exp(y2 xi2(theta)))."""
    e13 = builtin_cocycle(4).components[(1, 3)]
    rule = quadrature_rule(2, t_order)
    step = 1e-5
    total = 0.0
    for i in range(theta_nodes):
        theta = i / theta_nodes

        if kind is ContractionKind.EXPLICIT:
            # exp((1-t0) y1 xi1) exp(t2 y2 xi2) directly; the log of an
            # exponential path is the path's argument
            def point_at(t_vec, th):
                return expm((1.0 - t_vec[0]) * y1 * xi1.value(th)) @ expm(
                    t_vec[2] * y2 * xi2.value(th)
                )

        else:

            def point_at(t_vec, th):
                h1 = expm(y1 * xi1.value(th))
                h2 = expm(y2 * xi2.value(th))
                return contraction(kind, 2, t_vec, [h1, h2])

        for node, w in zip(rule.nodes, rule.weights):
            base = point_at(node, theta)
            tangents = []
            for a in (1, 2):
                tp = np.array(node)
                tm = np.array(node)
                tp[a] += step
                tp[0] -= step
                tm[a] -= step
                tm[0] += step
                diff = (point_at(tp, theta) - point_at(tm, theta)) / (2.0 * step)
                tangents.append(tangent_frame([skew_project(base.T @ diff)]))
            diff = (point_at(node, theta + step) - point_at(node, theta - step)) / (2.0 * step)
            tangents.append(tangent_frame([skew_project(base.T @ diff)]))
            val = e13.fn(nerve_point([base]), tuple(tangents))
            total += w * val / theta_nodes
    return float(LEVEL1_LOOP_SCALE * total)


# ---------------------------------------------------------------------------
# the antisymmetrized mixed-partial map (group cochains -> algebra cochains)


def antisymmetrized_mixed_partial(
    c: Callable[[float, object, float, object], float],
    xi1,
    xi2,
    step: float = 1e-3,
) -> float:
    """[d^2/dy1 dy2 (c(e^{y1 xi1}, e^{y2 xi2}) - c(e^{y2 xi2}, e^{y1 xi1}))]_0.

    ``c`` receives (y_first, xi_first, y_second, xi_second) and is expected to
    evaluate the underlying two-argument functional on the scaled exponential
    paths.  Fourth-order central stencil in each variable.
    """
    offsets = (-2.0 * step, -step, step, 2.0 * step)
    weights = (1.0, -8.0, 8.0, -1.0)

    def f(a: float, b: float) -> float:
        return c(a, xi1, b, xi2) - c(b, xi2, a, xi1)

    total = 0.0
    for oa, wa in zip(offsets, weights):
        for ob, wb in zip(offsets, weights):
            total += wa * wb * f(oa, ob)
    return float(total / (12.0 * step) ** 2)


def closed_form_mixed_partial(xi1: LoopElement, xi2: LoopElement, nodes: int | None = None) -> float:
    """(-1/(128 pi^2)) sum_tau sgn(tau) int_0^1 (xi1')_{tau(1)tau(2)}
    (xi2)_{tau(3)tau(4)} dtheta: the expected mixed partial of the level-2
    loop functional."""
    if nodes is None:
        nodes = 4 * (xi1.max_frequency + xi2.max_frequency) + 8
    d1 = xi1.derivative()
    total = 0.0
    for i in range(nodes):
        theta = i / nodes
        total += pf_pairing(d1.value(theta), xi2.value(theta))
    return float(-(total / nodes) / (128.0 * np.pi**2))
