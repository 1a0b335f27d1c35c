"""Euler-class cochains on the nerve of SO(2p).

Two independent code paths construct the same cochains:

* ``edge_cochain`` / ``diagonal_cochain`` / ``euler_component`` generate every
  component of the degree-2p Euler cocycle from the combinatorial description
  (words in the conjugated right-translation forms phi_s, square insertions
  R_ij = (phi_i + ... + phi_{j-1})^2, exact Dirichlet coefficients);
* ``builtin_cocycle`` transcribes the explicit low-rank cochains for
  n in {2, 4, 6} letter by letter.

Cross-agreement of the two paths and the vanishing of the total differential
are what the test suites certify.

The normalized Pfaffian used throughout is

    pf(A) = (1 / (2^{2p} pi^p p!)) sum_{tau in S_{2p}} sgn(tau)
            a_{tau(1)tau(2)} ... a_{tau(2p-1)tau(2p)},

i.e. the standard Pfaffian divided by (2 pi)^p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product

import numpy as np
from scipy.linalg import expm

from .forms import (
    Factor,
    FormEvaluator,
    WordForm,
    conj_rmc,
    generator_value,
    lin,
    lmc,
    perm_table,
    phi,
    rmc,
    square,
    sumphi,
    wedge2,
    word,
    word_sum_form,
)
from .matgroup import (
    NervePoint,
    TangentFrame,
    adjoint,
    nerve_point,
    random_skew,
    sample_haar,
    tangent_frame,
)
from .simplex import monomial_integral


# ---------------------------------------------------------------------------
# Pfaffian


def pfaffian_contraction(mats: list[np.ndarray]) -> float:
    """sum_{tau in S_{2p}} sgn(tau) prod_i (mats[i])_{tau(2i-1) tau(2i)}."""
    p = len(mats)
    n = 2 * p
    for m in mats:
        if m.shape != (n, n):
            raise ValueError(f"expected {p} matrices of shape ({n},{n})")
    table, signs = perm_table(n)
    prod_vals = np.ones(len(signs))
    for i, m in enumerate(mats):
        prod_vals *= m[table[:, 2 * i], table[:, 2 * i + 1]]
    return float(prod_vals @ signs)


def euler_pfaffian(a: np.ndarray) -> float:
    """Pfaffian normalized by (2 pi)^{-p}; represents the Euler class."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n or n % 2:
        raise ValueError("need an even-dimensional square matrix")
    p = n // 2
    coeff = 1.0 / (2.0 ** (2 * p) * np.pi**p * math.factorial(p))
    return coeff * pfaffian_contraction([a] * p)


# ---------------------------------------------------------------------------
# generated cochain components


def _edge_rational(p: int) -> Fraction:
    sign = -1 if p % 2 else 1
    binom = math.comb(2 * p - 1, p - 1)
    return Fraction(sign, 2 ** (2 * p) * math.factorial(p) * binom * p)


def edge_cochain(p: int) -> FormEvaluator:
    """Degree-(2p-1) form on NG(1): the level-1 Euler component.

    Sum over the p positions of the single linear letter among p-1 squared
    letters of h^{-1} dh, with the exact edge coefficient.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    rat = _edge_rational(p)
    words = []
    for k in range(1, p + 1):
        factors = [square(lmc(1)) for _ in range(k - 1)]
        factors.append(lin(lmc(1)))
        factors.extend(square(lmc(1)) for _ in range(p - k))
        words.append(word(None, factors, rational=rat, pi_power=p))
    return word_sum_form(1, 2 * p, words)


def diagonal_cochain(p: int) -> FormEvaluator:
    """Degree-p form on NG(p): the level-p Euler component.

    Signed sum over orderings of the p conjugated right-translation letters
    phi_1, ..., phi_p.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    sign = -1 if (p * (p + 1) // 2) % 2 else 1
    rat = Fraction(sign, 2 ** (2 * p) * math.factorial(p) ** 2)
    words = []
    for sigma in permutations(range(1, p + 1)):
        sgn = _perm_sign(sigma)
        factors = [lin(phi(s)) for s in sigma]
        words.append(word(None, factors, rational=sgn * rat, pi_power=p))
    return word_sum_form(p, 2 * p, words)


def _perm_sign(seq) -> int:
    inv = sum(
        1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j]
    )
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class ComponentWords:
    """Words of one generated component plus their exact coefficients."""

    level: int
    degree: int
    n: int
    words: tuple[WordForm, ...]

    def form(self) -> FormEvaluator:
        return word_sum_form(self.level, self.n, self.words)

    def rationals(self) -> set[Fraction]:
        return {abs(w.rational) for w in self.words}


def euler_component_words(p: int, q: int) -> ComponentWords:
    """Level-(p-q) component of the Euler cocycle, 0 <= q <= p-1.

    Words consist of the p-q letters phi_{sigma(1)}, ..., phi_{sigma(p-q)}
    interleaved with q square insertions R_ij (i < j labels into the p-q+1
    gaps, overlaps allowed); the coefficient carries sgn(sigma), the parity
    (-1)^{p + (p-q)(p-q-1)/2}, the Pfaffian normalization and the exact
    simplex integral of prod (t_{i-1} t_{j-1})^{r_ij}.
    """
    if not 0 <= q <= p - 1:
        raise ValueError("need 0 <= q <= p-1")
    m = p - q  # number of phi letters; level of the component
    sign = -1 if (p + m * (m - 1) // 2) % 2 else 1
    base = Fraction(sign, 2 ** (2 * p) * math.factorial(p))
    labels = list(combinations(range(1, m + 2), 2))
    gaps = range(m + 1)
    words = []
    for sigma in permutations(range(1, m + 1)):
        sgn = _perm_sign(sigma)
        for placement in combinations_with_replacement(product(labels, gaps), q):
            exponents = [0] * (m + 1)
            per_gap: dict[int, list[tuple[int, int]]] = {g: [] for g in gaps}
            for (i, j), g in placement:
                exponents[i - 1] += 1
                exponents[j - 1] += 1
                per_gap[g].append((i, j))
            integral = monomial_integral(exponents)
            factors: list[Factor] = []
            for g in gaps:
                for (i, j) in sorted(per_gap[g]):
                    factors.append(square(phi(i) if j == i + 1 else sumphi(i, j)))
                if g < m:
                    factors.append(lin(phi(sigma[g])))
            words.append(word(None, factors, rational=sgn * base * integral, pi_power=p))
    return ComponentWords(level=m, degree=p + q, n=2 * p, words=tuple(words))


def euler_component(p: int, q: int) -> FormEvaluator:
    return euler_component_words(p, q).form()


def generated_cocycle(p: int):
    """All components of the generated Euler cocycle for SO(2p)."""
    from .nerve import Cochain

    comps = {}
    for q in range(p - 1, -1, -1):
        ev = euler_component(p, q)
        comps[(p - q, p + q)] = ev
    return Cochain(n=2 * p, components=comps)


# ---------------------------------------------------------------------------
# hard-coded low-rank cochains


def builtin_cocycle(n: int):
    """The explicit Euler cochains for n in {2, 4, 6}, transcribed letter by
    letter (independent of the generator path)."""
    from .nerve import Cochain

    if n == 2:
        w = word(None, [lin(lmc(1))], rational=Fraction(-1, 4), pi_power=1)
        return Cochain(n=2, components={(1, 1): word_sum_form(1, 2, [w])})

    if n == 4:
        c13 = Fraction(1, 192)
        e13 = word_sum_form(
            1,
            4,
            [
                word(None, [lin(lmc(1)), square(lmc(1))], rational=c13, pi_power=2),
                word(None, [square(lmc(1)), lin(lmc(1))], rational=c13, pi_power=2),
            ],
        )
        c22 = Fraction(-1, 64)
        e22 = word_sum_form(
            2,
            4,
            [
                word(None, [lin(lmc(1)), lin(rmc(2))], rational=c22, pi_power=2),
                word(None, [lin(rmc(2)), lin(lmc(1))], rational=-c22, pi_power=2),
            ],
        )
        return Cochain(n=4, components={(1, 3): e13, (2, 2): e22})

    if n == 6:
        c15 = Fraction(-1, 2**6 * 180)
        e15_words = []
        for k in range(3):
            factors = [square(lmc(1))] * 3
            factors[k] = lin(lmc(1))
            e15_words.append(word(None, factors, rational=c15, pi_power=3))
        e15 = word_sum_form(1, 6, e15_words)

        # bracket insertion: 2 A^2 + 2 B^2 + A^B + B^A with A = h1^{-1}dh1,
        # B = dh2 h2^{-1}
        a, b = lmc(1), rmc(2)
        bracket_parts = [
            (Fraction(2), square(a)),
            (Fraction(2), square(b)),
            (Fraction(1), wedge2(a, b)),
            (Fraction(1), wedge2(b, a)),
        ]
        c24 = Fraction(1, 2**6 * 6 * 24)
        e24_words = []
        for sigma in ((1, 2), (2, 1)):
            sgn = _perm_sign(sigma)
            letters = [lin(a) if s == 1 else lin(b) for s in sigma]
            for gap in range(3):
                for mult, part in bracket_parts:
                    factors = letters[:gap] + [part] + letters[gap:]
                    e24_words.append(
                        word(None, factors, rational=sgn * mult * c24, pi_power=3)
                    )
        e24 = word_sum_form(2, 6, e24_words)

        c33 = Fraction(1, 2**6 * 36)
        letters33 = {1: lmc(1), 2: rmc(2), 3: conj_rmc(3, 2)}
        e33_words = []
        for sigma in permutations((1, 2, 3)):
            sgn = _perm_sign(sigma)
            factors = [lin(letters33[s]) for s in sigma]
            e33_words.append(word(None, factors, rational=sgn * c33, pi_power=3))
        e33 = word_sum_form(3, 6, e33_words)

        return Cochain(n=6, components={(1, 5): e15, (2, 4): e24, (3, 3): e33})

    raise ValueError(f"no built-in cochain for n = {n} (supported: 2, 4, 6)")


# ---------------------------------------------------------------------------
# clutching-loop Euler number (SO(2))


def clutching_euler_number(k: int, steps: int = 256) -> float:
    """Integrate the level-1 SO(2) component along theta -> R(2 pi k theta).

    The pullback of the normalized angle form along a winding-k clutching
    loop integrates to the Euler number k of the associated rank-2 bundle
    over S^2.
    """
    if steps < 64:
        raise ValueError("steps must be >= 64")
    e11 = builtin_cocycle(2).components[(1, 1)]
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    total = 0.0
    for i in range(steps):
        theta = (i + 0.5) / steps
        ang = 2.0 * np.pi * k * theta
        h = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        # left-trivialized loop derivative: h^{-1} h' = 2 pi k J
        xi = 2.0 * np.pi * k * j
        val = e11.fn(nerve_point([h]), (tangent_frame([xi]),))
        total += val / steps
    return total


# ---------------------------------------------------------------------------
# the simplicial bundle projection gamma: (g_0, ..., g_q) -> (g_0 g_1^{-1}, ...)


def bundle_projection(gs: list[np.ndarray]) -> NervePoint:
    comps = [gs[i] @ gs[i + 1].T for i in range(len(gs) - 1)]
    return nerve_point(comps, n=gs[0].shape[0])


def bundle_projection_pushforward(
    gs: list[np.ndarray], xis: list[np.ndarray]
) -> TangentFrame:
    """Exact differential in left trivialization: slot m receives
    Ad(g_m)(xi_{m-1} - xi_m)."""
    comps = [adjoint(gs[m], xis[m - 1] - xis[m]) for m in range(1, len(gs))]
    return tangent_frame(comps, n=gs[0].shape[0])


def phi_pullback_variants(
    s: int,
    q: int,
    samples: int,
    rng: np.random.Generator,
    n: int = 4,
) -> dict[str, float]:
    """Residuals of gamma^* phi_s against candidate conjugation identities.

    Each candidate conjugates theta_{s-1} - theta_s (evaluated on the total
    tangents, theta_i reading slot i) by a different group element: the first
    coordinate g_0, the second coordinate g_1, or the partial product
    g_0 ... g_{s-1}.  Also reports the finite-difference defect of the exact
    pushforward.
    """
    if not 1 <= s <= q:
        raise ValueError("need 1 <= s <= q")
    residuals = {"conj_g0": 0.0, "conj_g1": 0.0, "conj_partial": 0.0, "pushforward_fd": 0.0}
    step = 1e-5
    for _ in range(samples):
        gs = [sample_haar(n, rng) for _ in range(q + 1)]
        xis = [random_skew(n, rng) for _ in range(q + 1)]
        point = bundle_projection(gs)
        frame = bundle_projection_pushforward(gs, xis)
        lhs = generator_value(phi(s), point, frame)

        # finite-difference check of the exact pushforward through gamma
        moved_p = bundle_projection([g @ expm(step * x) for g, x in zip(gs, xis)])
        moved_m = bundle_projection([g @ expm(-step * x) for g, x in zip(gs, xis)])
        for m in range(q):
            diff = (moved_p.components[m] - moved_m.components[m]) / (2 * step)
            fd = 0.5 * (point.components[m].T @ diff - (point.components[m].T @ diff).T)
            residuals["pushforward_fd"] = max(
                residuals["pushforward_fd"],
                float(np.max(np.abs(fd - frame.components[m]))),
            )

        delta = xis[s - 1] - xis[s]
        for name, g in (
            ("conj_g0", gs[0]),
            ("conj_g1", gs[1]),
            ("conj_partial", _prod(gs[:s])),
        ):
            rhs = adjoint(g, delta)
            residuals[name] = max(residuals[name], float(np.max(np.abs(lhs - rhs))))
    return residuals


def _prod(mats):
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


# ---------------------------------------------------------------------------
# JSON term export


def words_to_json(level: int, n: int, words: list[WordForm]) -> list[dict]:
    """Expand the tau-sums of the words into explicit scalar terms."""
    table, signs = perm_table(n)
    out = []
    for w in words:
        for row, sgn in zip(table, signs):
            factors = []
            for i, f in enumerate(w.factors):
                entry = [int(row[2 * i] + 1), int(row[2 * i + 1] + 1)]
                factors.append(
                    {
                        "generator": _combo_json(f.a),
                        "square": f.degree == 2,
                        **({"second": _combo_json(f.b)} if f.b is not None and f.b != f.a else {}),
                        "entry": entry,
                    }
                )
            out.append({"coefficient": w.coefficient * float(sgn), "factors": factors})
    return out


def _combo_json(c) -> list[dict]:
    return [
        {
            "kind": g.kind,
            "slot": g.slot,
            **({"start": g.start} if g.kind in ("conj_rmc", "sumphi") else {}),
            **({"stop": g.stop} if g.kind == "sumphi" else {}),
            "coeff": coeff,
        }
        for coeff, g in c
    ]
