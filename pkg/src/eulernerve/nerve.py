"""Simplicial structure of the nerve NG and the total-complex differential.

Face operators on NG(q) = G^q:

    eps_0(h_1, ..., h_q) = (h_2, ..., h_q)
    eps_i(h_1, ..., h_q) = (h_1, ..., h_i h_{i+1}, ..., h_q)   1 <= i <= q-1
    eps_q(h_1, ..., h_q) = (h_1, ..., h_{q-1})

The simplicial differential d' is the alternating sum of face pullbacks; the
form differential d'' is (-1)^level times the exterior derivative.  Their sum
is the total differential whose kernel the verification routines probe.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .forms import FormEvaluator, exterior_derivative, scale_form
from .matgroup import (
    NervePoint,
    TangentFrame,
    adjoint,
    random_frame,
)


def face_point(i: int, q: int, p: NervePoint) -> NervePoint:
    if p.level != q:
        raise ValueError(f"point has level {p.level}, expected {q}")
    if not 0 <= i <= q:
        raise IndexError(f"face index {i} out of range 0..{q}")
    hs = p.components
    if i == 0:
        comps = hs[1:]
    elif i == q:
        comps = hs[:-1]
    else:
        comps = hs[: i - 1] + (hs[i - 1] @ hs[i],) + hs[i + 1 :]
    return NervePoint(n=p.n, components=comps)


def face_pushforward(i: int, q: int, p: NervePoint, v: TangentFrame) -> TangentFrame:
    """Exact differential of eps_i in left trivialization.

    The merged slot receives Ad(h_{i+1}^{-1}) xi_i + xi_{i+1}; dropped slots
    drop their vector.
    """
    if p.level != q or v.level != q:
        raise ValueError("point/frame level mismatch")
    if not 0 <= i <= q:
        raise IndexError(f"face index {i} out of range 0..{q}")
    xs = v.components
    if i == 0:
        comps = xs[1:]
    elif i == q:
        comps = xs[:-1]
    else:
        h_next = p.components[i]
        merged = adjoint(h_next.T, xs[i - 1]) + xs[i]
        comps = xs[: i - 1] + (merged,) + xs[i + 1 :]
    return TangentFrame(n=v.n, components=comps)


def d_prime(omega: FormEvaluator) -> FormEvaluator:
    """Simplicial differential: alternating sum over faces, exact pushforwards."""
    q = omega.level + 1

    def fn(p: NervePoint, frames: Sequence[TangentFrame]) -> float:
        total = 0.0
        for i in range(q + 1):
            fp = face_point(i, q, p)
            fv = tuple(face_pushforward(i, q, p, w) for w in frames)
            term = omega.fn(fp, fv)
            total += -term if i % 2 else term
        return total

    return FormEvaluator(q, omega.degree, fn)


def d_second(omega: FormEvaluator, step: float = 1e-4) -> FormEvaluator:
    """(-1)^level times the exterior derivative."""
    d = exterior_derivative(omega, step=step)
    return scale_form(-1.0, d) if omega.level % 2 else d


@dataclass(frozen=True)
class Cochain:
    """Element of the total complex: bidegree (level, degree) -> form."""

    n: int
    components: dict[tuple[int, int], FormEvaluator]

    @property
    def total_degree(self) -> int:
        degs = {r + s for (r, s) in self.components}
        if len(degs) != 1:
            raise ValueError(f"mixed total degrees {sorted(degs)}")
        return degs.pop()

    def __post_init__(self):
        for (r, s), form in self.components.items():
            if form.level != r or form.degree != s:
                raise ValueError(f"component at {(r, s)} has shape "
                                 f"({form.level}, {form.degree})")
        self.total_degree  # validates homogeneity


@dataclass
class ResidualReport:
    """Outcome of a total-cocycle check."""

    tolerance: float
    sample_count: int
    max_residual: float
    bidegree_residuals: dict[str, float]
    sign_assignment: dict[str, int] | None
    consistent_assignments: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "sample_count": self.sample_count,
            "max_residual": self.max_residual,
            "bidegree_residuals": self.bidegree_residuals,
            "sign_assignment": self.sign_assignment,
            "consistent_assignments": self.consistent_assignments,
            "pass": self.passed,
        }


def verify_total_cocycle(
    cochain: Cochain,
    *,
    samples: int,
    tol: float,
    rng: np.random.Generator,
    point_sampler: Callable[[int, np.random.Generator], NervePoint],
    frame_norm: float = 1.0,
    fd_step: float = 1e-4,
    sign_audit: bool = True,
    workers: int = 1,
) -> ResidualReport:
    """Sample the components of (d' + d'') applied to the cochain.

    For every adjacent bidegree the two contributions (d' of the component one
    level below, d'' of the component one degree below) are evaluated
    separately on shared sample points, so an optional audit can search the
    per-component sign flips {+-1} for the unique assignment (first component
    fixed to +1) under which all residuals vanish.
    """
    comps = cochain.components
    keys = sorted(comps)
    n = cochain.n

    # contributions[(R, S)] = list of (source_key, evaluator)
    contributions: dict[tuple[int, int], list[tuple[tuple[int, int], FormEvaluator]]] = {}
    out_bidegrees = set()
    for (r, s) in keys:
        out_bidegrees.add((r + 1, s))
        out_bidegrees.add((r, s + 1))
    for R, S in sorted(out_bidegrees):
        parts = []
        if (R - 1, S) in comps:
            parts.append(((R - 1, S), d_prime(comps[(R - 1, S)])))
        if (R, S - 1) in comps:
            parts.append(((R, S - 1), d_second(comps[(R, S - 1)], step=fd_step)))
        contributions[(R, S)] = parts

    # sample inputs are drawn sequentially so results are independent of the
    # worker count; evaluation is pure and parallelizes over samples
    tasks = []
    for _ in range(samples):
        for (R, S), parts in contributions.items():
            point = point_sampler(R, rng)
            frames = tuple(random_frame(R, n, rng, norm=frame_norm) for _ in range(S))
            tasks.append(((R, S), point, frames))

    def run(task):
        bd, point, frames = task
        return bd, {src: ev.fn(point, frames) for src, ev in contributions[bd]}

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    values: dict[tuple[int, int], list[dict[tuple[int, int], float]]] = {
        bd: [] for bd in contributions
    }
    for bd, row in results:
        values[bd].append(row)

    def max_residuals(signs: dict[tuple[int, int], int]) -> tuple[float, dict[str, float]]:
        per_bd: dict[str, float] = {}
        worst = 0.0
        for bd, rows in values.items():
            m = 0.0
            for row in rows:
                m = max(m, abs(sum(signs[src] * val for src, val in row.items())))
            per_bd[f"{bd[0]},{bd[1]}"] = m
            worst = max(worst, m)
        return worst, per_bd

    base_signs = {k: 1 for k in keys}
    base_max, base_per = max_residuals(base_signs)

    assignment = None
    consistent = 0
    if sign_audit and len(keys) >= 1:
        first, rest = keys[0], keys[1:]
        for flips in product((1, -1), repeat=len(rest)):
            signs = {first: 1, **dict(zip(rest, flips))}
            worst, _ = max_residuals(signs)
            if worst < tol:
                consistent += 1
                if assignment is None:
                    assignment = {f"{k[0]},{k[1]}": signs[k] for k in keys}
    else:
        if base_max < tol:
            consistent = 1
            assignment = {f"{k[0]},{k[1]}": 1 for k in keys}

    return ResidualReport(
        tolerance=tol,
        sample_count=samples,
        max_residual=base_max,
        bidegree_residuals=base_per,
        sign_assignment=assignment,
        consistent_assignments=consistent,
        passed=base_max < tol,
    )
