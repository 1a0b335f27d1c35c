"""Transgression of the SO(4) Euler cocycle into the truncated local complex.

A family of contraction maps sigma_l : Delta^l x U^l -> U (U a small
neighborhood of the identity) is combined with the level maps

    f_{m,q}(t; h_1, ..., h_{m+q-1}) = (h_1, ..., h_{m-1},
                                       sigma_q(t; h_m, ..., h_{m+q-1}))

to fiber-integrate the Euler components mu_m into forms

    beta_{m,q} = (-1)^m  int_{Delta^q} f_{m,q}^* mu_m

on U^{m+q-1}.  For p = 2 the sums eta_0 = beta_{2,2} + beta_{1,3} (functions
on U^3) and eta_1 = beta_{2,1} + beta_{1,2} (1-forms on U^2) form a cocycle of
the total complex truncated to form degrees < 2; the verification routine
samples the two surviving components of its total differential.

Fiber integration slots the simplex directions first:
(int_{Delta^q} alpha)(X_1, ..., X_s) = int alpha(dt_1, ..., dt_q, X_1, ...).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .forms import FormEvaluator, add_forms, scale_form
from .matgroup import (
    DomainError,
    NervePoint,
    TangentFrame,
    exp_alg,
    log_grp,
    nerve_point,
    random_frame,
    sample_near_identity,
    skew_project,
    tangent_frame,
)
from .nerve import d_prime, d_second
from .simplex import quadrature_rule

_APEX_EPS = 1e-13


class ContractionKind(Enum):
    CONE = "cone"
    EXPLICIT = "explicit"  # the first-order exp-interpolation variant


def contraction(
    kind: ContractionKind, l: int, t: Sequence[float], hs: Sequence[np.ndarray]
) -> np.ndarray:
    """sigma_l(t_0, ..., t_l; h_1, ..., h_l) for near-identity h's.

    CONE satisfies the simplicial compatibility exactly:
        sigma_l(t; h) = rho_{1-t_0}(h_1 sigma_{l-1}((t_1..t_l)/(1-t_0); h_2..)),
        rho_s(u) = exp(s log u),
    with value 1 at the apex t_0 = 1.  EXPLICIT is the first-order variant

        sigma_1(t; h)        = exp(t_1 log h)
        sigma_2(t; h_1, h_2) = exp((1-t_0) log h_1) exp(t_2 log h_2)

    which violates compatibility at the middle face for noncommuting inputs
    and is kept only to reproduce the loop-functional computation.
    """
    t = np.asarray(t, dtype=float)
    if len(t) != l + 1:
        raise ValueError(f"expected {l + 1} barycentric coordinates, got {len(t)}")
    if len(hs) != l:
        raise ValueError(f"expected {l} group arguments, got {len(hs)}")
    if l == 0:
        raise ValueError("use identity for sigma_0; need n")
    n = hs[0].shape[0]
    return _contract(kind, t, list(hs), n)


def _contract(kind: ContractionKind, t: np.ndarray, hs: list[np.ndarray], n: int) -> np.ndarray:
    l = len(hs)
    if l == 0:
        return np.eye(n)
    if kind is ContractionKind.EXPLICIT:
        if l == 1:
            return exp_alg(t[1] * log_grp(hs[0]))
        if l == 2:
            return exp_alg((1.0 - t[0]) * log_grp(hs[0])) @ exp_alg(t[2] * log_grp(hs[1]))
        raise ValueError("the explicit variant is defined for l <= 2")
    # CONE recursion
    t0 = t[0]
    rest = 1.0 - t0
    if rest <= _APEX_EPS:
        return np.eye(n)
    inner = _contract(kind, t[1:] / rest, hs[1:], n)
    u = hs[0] @ inner
    return exp_alg(rest * log_grp(u))


def level_map(
    m: int,
    q: int,
    t: Sequence[float],
    hs: Sequence[np.ndarray],
    kind: ContractionKind = ContractionKind.CONE,
) -> NervePoint:
    """f_{m,q}: the first m-1 arguments pass through, the rest contract."""
    hs = list(hs)
    if len(hs) != m + q - 1:
        raise ValueError(f"expected {m + q - 1} group arguments, got {len(hs)}")
    comps = hs[: m - 1] + [contraction(kind, q, t, hs[m - 1 :])]
    return nerve_point(comps, n=hs[0].shape[0])


def _trivialized_fd(base: NervePoint, plus: NervePoint, minus: NervePoint, h: float) -> TangentFrame:
    comps = []
    for b, pl, mi in zip(base.components, plus.components, minus.components):
        diff = (pl - mi) / (2.0 * h)
        comps.append(skew_project(b.T @ diff))
    return tangent_frame(comps, n=base.n)


def transgression_form(
    mu: FormEvaluator,
    m: int,
    q: int,
    *,
    kind: ContractionKind = ContractionKind.CONE,
    quad_order: int = 8,
    fd_step: float = 1e-4,
    scale: float = 1.0,
) -> FormEvaluator:
    """beta_{m,q} = (-1)^m int_{Delta^q} f_{m,q}^* mu on U^{m+q-1}.

    Simplex-direction and U-direction tangents of the level map are pushed
    through sigma by central finite differences and left-trivialized.
    """
    if mu.level != m:
        raise ValueError(f"mu has level {mu.level}, expected {m}")
    degree = mu.degree - q
    if degree < 0:
        raise ValueError("fiber dimension exceeds form degree")
    level = m + q - 1
    rule = quadrature_rule(q, quad_order)
    sign = -1.0 if m % 2 else 1.0

    def fn(p: NervePoint, frames: Sequence[TangentFrame]) -> float:
        hs = list(p.components)
        total = 0.0
        for node, weight in zip(rule.nodes, rule.weights):
            base = level_map(m, q, node, hs, kind)
            tangents = []
            # simplex directions d/dt_a, a = 1..q (t_0 compensates)
            for a in range(1, q + 1):
                tp = np.array(node)
                tm = np.array(node)
                tp[a] += fd_step
                tp[0] -= fd_step
                tm[a] -= fd_step
                tm[0] += fd_step
                plus = level_map(m, q, tp, hs, kind)
                minus = level_map(m, q, tm, hs, kind)
                tangents.append(_trivialized_fd(base, plus, minus, fd_step))
            # U directions along the supplied frames
            for v in frames:
                hp = [hh @ exp_alg(fd_step * xi) for hh, xi in zip(hs, v.components)]
                hm = [hh @ exp_alg(-fd_step * xi) for hh, xi in zip(hs, v.components)]
                plus = level_map(m, q, node, hp, kind)
                minus = level_map(m, q, node, hm, kind)
                tangents.append(_trivialized_fd(base, plus, minus, fd_step))
            total += weight * mu.fn(base, tuple(tangents))
        return sign * scale * total

    return FormEvaluator(level, degree, fn)


@dataclass(frozen=True)
class LocalCochain:
    """eta_0 (function on U^3) and eta_1 (1-form on U^2) for p = 2."""

    eta0: FormEvaluator
    eta1: FormEvaluator
    radius: float


def local_cochain(
    *,
    kind: ContractionKind = ContractionKind.CONE,
    quad_order: int = 8,
    fd_step: float = 1e-4,
    radius: float = 0.1,
    beta21_scale: float = 1.0,
) -> LocalCochain:
    from .euler import builtin_cocycle

    comps = builtin_cocycle(4).components
    mu1 = comps[(1, 3)]
    mu2 = comps[(2, 2)]
    beta22 = transgression_form(mu2, 2, 2, kind=kind, quad_order=quad_order, fd_step=fd_step)
    beta13 = transgression_form(mu1, 1, 3, kind=kind, quad_order=quad_order, fd_step=fd_step)
    beta21 = transgression_form(
        mu2, 2, 1, kind=kind, quad_order=quad_order, fd_step=fd_step, scale=beta21_scale
    )
    beta12 = transgression_form(mu1, 1, 2, kind=kind, quad_order=quad_order, fd_step=fd_step)
    return LocalCochain(
        eta0=add_forms(beta22, beta13),
        eta1=add_forms(beta21, beta12),
        radius=radius,
    )


@dataclass
class TransgressionReport:
    eta0_residual: float
    eta1_residual: float
    quad_convergence: float
    tolerance: float
    sample_count: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "eta0_residual": float(self.eta0_residual),
            "eta1_residual": float(self.eta1_residual),
            "quad_convergence": float(self.quad_convergence),
            "tolerance": float(self.tolerance),
            "sample_count": int(self.sample_count),
            "pass": bool(self.passed),
        }


def truncated_cocycle_report(
    *,
    kind: ContractionKind = ContractionKind.CONE,
    samples: int = 10,
    tol: float = 1e-3,
    radius: float = 0.1,
    quad_order: int = 8,
    fd_step: float = 1e-4,
    d2_step: float = 1e-3,
    rng: np.random.Generator,
    beta21_scale: float = 1.0,
    check_convergence: bool = True,
) -> TransgressionReport:
    """Sample the two surviving components of the total differential of eta.

    Degree-0 component on U^4: the simplicial differential of eta_0.
    Degree-1 component on U^3: d' eta_1 + d'' eta_0.
    """
    lc = local_cochain(
        kind=kind, quad_order=quad_order, fd_step=fd_step, radius=radius,
        beta21_scale=beta21_scale,
    )
    eq0 = d_prime(lc.eta0)
    eq1 = add_forms(d_prime(lc.eta1), d_second(lc.eta0, step=d2_step))

    def sample_point(level):
        return nerve_point(
            [sample_near_identity(4, radius, rng) for _ in range(level)], n=4
        )

    r0 = 0.0
    r1 = 0.0
    for _ in range(samples):
        p4 = sample_point(4)
        r0 = max(r0, abs(eq0.fn(p4, ())))
        p3 = sample_point(3)
        frame = (random_frame(3, 4, rng),)
        r1 = max(r1, abs(eq1.fn(p3, frame)))

    conv = 0.0
    if check_convergence:
        from .euler import builtin_cocycle

        mu2 = builtin_cocycle(4).components[(2, 2)]
        b_lo = transgression_form(mu2, 2, 1, kind=kind, quad_order=quad_order, fd_step=fd_step)
        b_hi = transgression_form(mu2, 2, 1, kind=kind, quad_order=2 * quad_order, fd_step=fd_step)
        p2 = sample_point(2)
        v = (random_frame(2, 4, rng),)
        conv = abs(b_lo.fn(p2, v) - b_hi.fn(p2, v))

    return TransgressionReport(
        eta0_residual=float(r0),
        eta1_residual=float(r1),
        quad_convergence=float(conv),
        tolerance=tol,
        sample_count=samples,
        passed=bool(r0 < tol and r1 < tol),
    )
