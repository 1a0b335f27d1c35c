"""Differential forms on G^r built from matrix-valued 1-form generators.

Conventions, used consistently across the package:

* wedge products follow the shuffle convention with no factorial
  normalization, so for matrix-valued 1-forms (theta ^ theta)(X, Y) =
  [theta(X), theta(Y)] and the left Maurer-Cartan form satisfies
  d theta = -theta ^ theta;
* tangent vectors are left-trivialized (see matgroup);
* a scalar form of interest is a sum over tau in S_{2p} of sgn(tau) times a
  word of matrix entries, factor i reading its entry pair at positions
  (tau(2i-1), tau(2i)).  Words carry the coefficient, the factors carry the
  matrix-valued forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .matgroup import (
    NervePoint,
    TangentFrame,
    adjoint,
    frame_bracket,
    move_point,
)

# ---------------------------------------------------------------------------
# matrix-valued 1-form generators


@dataclass(frozen=True)
class Generator:
    """One matrix-valued 1-form on G^r.

    kind:
      "lmc"       h_k^{-1} dh_k                      -> xi_k
      "rmc"       dh_k h_k^{-1}                      -> h_k xi_k h_k^{-1}
      "conj_rmc"  (h_a...h_{k-1}) dh_k h_k^{-1} (h_{k-1}^{-1}...h_a^{-1})
                                                     -> Ad(h_a...h_k) xi_k
      "sumphi"    phi_i + ... + phi_{j-1}, phi_s = conj_rmc(s, a=1)
    """

    kind: str
    slot: int = 0
    start: int = 1
    stop: int = 0

    def max_slot(self) -> int:
        return self.stop - 1 if self.kind == "sumphi" else self.slot


def lmc(k: int) -> Generator:
    return Generator("lmc", slot=k)


def rmc(k: int) -> Generator:
    return Generator("rmc", slot=k)


def phi(s: int) -> Generator:
    return Generator("conj_rmc", slot=s, start=1)


def conj_rmc(k: int, start: int) -> Generator:
    return Generator("conj_rmc", slot=k, start=start)


def sumphi(i: int, j: int) -> Generator:
    if not 1 <= i < j:
        raise ValueError("sumphi needs 1 <= i < j")
    return Generator("sumphi", start=i, stop=j)


def generator_value(gen: Generator, p: NervePoint, v: TangentFrame) -> np.ndarray:
    """Value of the generator on one (left-trivialized) tangent vector."""
    hs = p.components
    xis = v.components
    if gen.kind == "lmc":
        return xis[gen.slot - 1]
    if gen.kind == "rmc":
        h = hs[gen.slot - 1]
        return adjoint(h, xis[gen.slot - 1])
    if gen.kind == "conj_rmc":
        k = gen.slot
        val = adjoint(hs[k - 1], xis[k - 1])
        for idx in range(k - 2, gen.start - 2, -1):
            val = adjoint(hs[idx], val)
        return val
    if gen.kind == "sumphi":
        total = generator_value(phi(gen.start), p, v)
        for s in range(gen.start + 1, gen.stop):
            total = total + generator_value(phi(s), p, v)
        return total
    raise ValueError(f"unknown generator kind {gen.kind!r}")


Combo = tuple[tuple[float, Generator], ...]


def combo(*terms: tuple[float, Generator]) -> Combo:
    return tuple(terms)


def single(gen: Generator) -> Combo:
    return ((1.0, gen),)


def combo_value(c: Combo, p: NervePoint, v: TangentFrame) -> np.ndarray:
    total = None
    for coeff, gen in c:
        val = coeff * generator_value(gen, p, v)
        total = val if total is None else total + val
    return total


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Factor:
    """Scalar-form factor of a word: an entry of ``a`` (degree 1) or of the
    wedge product ``a ^ b`` (degree 2, matrix product with wedged entries)."""

    a: Combo
    b: Combo | None = None

    @property
    def degree(self) -> int:
        return 1 if self.b is None else 2


def lin(gen_or_combo) -> Factor:
    c = single(gen_or_combo) if isinstance(gen_or_combo, Generator) else gen_or_combo
    return Factor(a=c)


def square(gen_or_combo) -> Factor:
    c = single(gen_or_combo) if isinstance(gen_or_combo, Generator) else gen_or_combo
    return Factor(a=c, b=c)


def wedge2(x, y) -> Factor:
    cx = single(x) if isinstance(x, Generator) else x
    cy = single(y) if isinstance(y, Generator) else y
    return Factor(a=cx, b=cy)


@dataclass(frozen=True)
class WordForm:
    """coefficient * sum_tau sgn(tau) * prod_i (factor_i)_{tau(2i-1) tau(2i)}.

    ``rational``/``pi_power`` optionally record the coefficient exactly as
    rational * pi**(-pi_power); ``coefficient`` is the float actually used.
    """

    coefficient: float
    factors: tuple[Factor, ...]
    rational: Fraction | None = None
    pi_power: int = 0

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.factors)


def word(coefficient, factors, rational: Fraction | None = None, pi_power: int = 0) -> WordForm:
    if rational is not None:
        coefficient = float(rational) * float(np.pi) ** (-pi_power)
    return WordForm(
        coefficient=float(coefficient),
        factors=tuple(factors),
        rational=rational,
        pi_power=pi_power,
    )


# ---------------------------------------------------------------------------
# permutation and shuffle tables


@lru_cache(maxsize=None)
def perm_table(m: int) -> tuple[np.ndarray, np.ndarray]:
    """All permutations of range(m) (rows) and their signs."""
    perms = list(itertools.permutations(range(m)))
    table = np.array(perms, dtype=np.intp)
    signs = np.empty(len(perms))
    for r, perm in enumerate(perms):
        inv = 0
        for i in range(m):
            for j in range(i + 1, m):
                if perm[i] > perm[j]:
                    inv += 1
        signs[r] = -1.0 if inv % 2 else 1.0
    return table, signs


@lru_cache(maxsize=None)
def shuffle_table(degrees: tuple[int, ...]) -> tuple[tuple[float, tuple[tuple[int, ...], ...]], ...]:
    """(sign, blocks) for every (d_1, ..., d_m)-shuffle of range(sum d_i).

    Each block lists the argument indices handed to one factor, ascending
    within the block; the sign is the parity of the concatenated assignment.
    """
    s = sum(degrees)
    out = []

    def parity(seq: tuple[int, ...]) -> float:
        inv = sum(
            1
            for i in range(len(seq))
            for j in range(i + 1, len(seq))
            if seq[i] > seq[j]
        )
        return -1.0 if inv % 2 else 1.0

    def rec(remaining: tuple[int, ...], degs: tuple[int, ...], blocks):
        if not degs:
            flat = tuple(i for b in blocks for i in b)
            out.append((parity(flat), tuple(blocks)))
            return
        d = degs[0]
        for chosen in itertools.combinations(remaining, d):
            rest = tuple(i for i in remaining if i not in chosen)
            rec(rest, degs[1:], blocks + [chosen])

    rec(tuple(range(s)), tuple(degrees), [])
    return tuple(out)


# ---------------------------------------------------------------------------
# evaluators


@dataclass(frozen=True)
class FormEvaluator:
    """A degree-s form on NG(r), evaluated on s left-trivialized frames."""

    level: int
    degree: int
    fn: Callable[[NervePoint, Sequence[TangentFrame]], float]

    def __call__(self, p: NervePoint, frames: Sequence[TangentFrame] = ()) -> float:
        if p.level != self.level:
            raise ValueError(f"point level {p.level} != form level {self.level}")
        if len(frames) != self.degree:
            raise ValueError(f"got {len(frames)} frames for a degree-{self.degree} form")
        return self.fn(p, tuple(frames))


def add_forms(*forms: FormEvaluator) -> FormEvaluator:
    first = forms[0]
    if any(f.level != first.level or f.degree != first.degree for f in forms):
        raise ValueError("can only add forms of equal level and degree")
    return FormEvaluator(
        level=first.level,
        degree=first.degree,
        fn=lambda p, v: sum(f.fn(p, v) for f in forms),
    )


def scale_form(c: float, omega: FormEvaluator) -> FormEvaluator:
    return FormEvaluator(omega.level, omega.degree, lambda p, v: c * omega.fn(p, v))


def constant_form(level: int, value: float) -> FormEvaluator:
    return FormEvaluator(level, 0, lambda p, v: value)


class WordSumEvaluator:
    """Evaluator for a sum of WordForms sharing one degree on one level.

    All words must have the same number of factors p with n = 2p, so every
    word is contracted against the same S_{2p} permutation table.
    """

    def __init__(self, level: int, n: int, words: Sequence[WordForm]):
        words = tuple(words)
        if not words:
            raise ValueError("need at least one word")
        degree = words[0].degree
        nfac = len(words[0].factors)
        if any(w.degree != degree or len(w.factors) != nfac for w in words):
            raise ValueError("all words must share degree and factor count")
        if n != 2 * nfac:
            raise ValueError(f"words with {nfac} factors need n = {2 * nfac}, got {n}")
        self.level = level
        self.n = n
        self.degree = degree
        self.words = words
        # rows: one per (word, shuffle); precompute coefficients and the
        # (combo-a, combo-b, frame-index assignment) recipe per row factor
        self._rows = []
        coeffs = []
        for w in words:
            degs = tuple(f.degree for f in w.factors)
            for sign, blocks in shuffle_table(degs):
                recipe = []
                for f, block in zip(w.factors, blocks):
                    if f.degree == 1:
                        recipe.append((f.a, None, block[0], -1))
                    else:
                        recipe.append((f.a, f.b, block[0], block[1]))
                self._rows.append(tuple(recipe))
                coeffs.append(w.coefficient * sign)
        self._coeffs = np.array(coeffs)
        self._table, self._signs = perm_table(n)

    def __call__(self, p: NervePoint, frames: Sequence[TangentFrame]) -> float:
        n = self.n
        nfac = n // 2
        cache: dict[tuple, np.ndarray] = {}

        def cval(c: Combo, j: int) -> np.ndarray:
            key = (c, j)
            got = cache.get(key)
            if got is None:
                got = combo_value(c, p, frames[j])
                cache[key] = got
            return got

        rows = self._rows
        mats = np.empty((len(rows), nfac, n, n))
        for r, recipe in enumerate(rows):
            for f, (ca, cb, i, j) in enumerate(recipe):
                if cb is None:
                    mats[r, f] = cval(ca, i)
                else:
                    mats[r, f] = cval(ca, i) @ cval(cb, j) - cval(ca, j) @ cval(cb, i)
        table, signs = self._table, self._signs
        prod = np.ones((len(rows), len(signs)))
        for f in range(nfac):
            prod *= mats[:, f][:, table[:, 2 * f], table[:, 2 * f + 1]]
        return float(self._coeffs @ (prod @ signs))

    def as_form(self) -> FormEvaluator:
        return FormEvaluator(self.level, self.degree, self)


def word_sum_form(level: int, n: int, words: Sequence[WordForm]) -> FormEvaluator:
    return WordSumEvaluator(level, n, words).as_form()


def evaluate_word(
    w: WordForm, p: NervePoint, frames: Sequence[TangentFrame]
) -> float:
    """Evaluate a single word (with its tau-sum) on the given frames."""
    ev = WordSumEvaluator(p.level, p.n, [w])
    if len(frames) != ev.degree:
        raise ValueError(f"word of degree {ev.degree} got {len(frames)} frames")
    return ev(p, tuple(frames))


# ---------------------------------------------------------------------------
# exterior derivative (coordinate-free Cartan formula, left-invariant
# extensions, central differences with one Richardson level)


def _directional(f: Callable[[float], float], step: float) -> float:
    d1 = (f(step) - f(-step)) / (2.0 * step)
    d2 = (f(0.5 * step) - f(-0.5 * step)) / step
    return (4.0 * d2 - d1) / 3.0


def exterior_derivative(omega: FormEvaluator, step: float = 1e-4) -> FormEvaluator:
    """d omega via Cartan's formula.

    The frames are extended to left-invariant fields, so the derivative terms
    are directional derivatives along (h_k exp(t xi_k)) flows and the bracket
    terms use the componentwise algebra bracket.
    """

    s = omega.degree

    def fn(p: NervePoint, frames: Sequence[TangentFrame]) -> float:
        total = 0.0
        for i in range(s + 1):
            rest = frames[:i] + frames[i + 1 :]
            vi = frames[i]
            f = lambda t: omega.fn(move_point(p, vi, t), rest)
            term = _directional(f, step)
            total += term if i % 2 == 0 else -term
        for i in range(s + 1):
            for j in range(i + 1, s + 1):
                merged = (frame_bracket(frames[i], frames[j]),) + tuple(
                    frames[k] for k in range(s + 1) if k != i and k != j
                )
                term = omega.fn(p, merged)
                total += -term if (i + j) % 2 else term
        return total

    return FormEvaluator(omega.level, s + 1, fn)
