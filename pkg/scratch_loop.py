import time

import numpy as np

from eulernerve.loopcocycle import (
    LEVEL2_LOOP_SCALE,
    antisymmetrized_mixed_partial,
    closed_form_mixed_partial,
    cocycle_residual,
    level1_loop_functional,
    level2_loop_functional,
    loop_bracket,
    loop_cocycle,
    loop_element,
    pf_pairing,
    random_loop,
)
from eulernerve.matgroup import random_skew

rng = np.random.default_rng(3)

# pf pairing values
E12 = np.zeros((4, 4)); E12[0, 1], E12[1, 0] = 1, -1
E34 = np.zeros((4, 4)); E34[2, 3], E34[3, 2] = 1, -1
X = E12 + E34
print("pf(X,X) =", pf_pairing(X, X), "(expect 8)")
print("pf(E12,E12) =", pf_pairing(E12, E12), "(expect 0)")

# ad-invariance
Z, A, B = (random_skew(4, rng) for _ in range(3))
print("ad-invariance:", abs(pf_pairing(Z @ A - A @ Z, B) + pf_pairing(A, Z @ B - B @ Z)))

# worked example: alpha(cos X, sin X) = 1/(8 pi)
zero = np.zeros((4, 4))
xi1 = loop_element(zero, [X], [zero])
xi2 = loop_element(zero, [zero], [X])
a = loop_cocycle(xi1, xi2)
print("alpha worked:", a, "expect", 1 / (8 * np.pi), "err", abs(a - 1 / (8 * np.pi)))

# cocycle residual
worst = 0.0
for _ in range(5):
    tr = [random_loop(4, 3, rng) for _ in range(3)]
    worst = max(worst, abs(cocycle_residual(*tr)))
print("cocycle residual (5 triples):", worst)

# bracket exactness: pointwise vs Fourier
x = random_loop(4, 2, rng)
y = random_loop(4, 3, rng)
br = loop_bracket(x, y)
errs = []
for theta in rng.uniform(0, 1, 7):
    lhs = br.value(theta)
    a_, b_ = x.value(theta), y.value(theta)
    errs.append(np.max(np.abs(lhs - (a_ @ b_ - b_ @ a_))))
print("bracket pointwise err:", max(errs))

# mixed partial of b vs closed form
xa = random_loop(4, 1, rng, norm=0.8)
xb = random_loop(4, 1, rng, norm=0.8)
t0 = time.time()
mp = antisymmetrized_mixed_partial(
    lambda ya, xia, yb, xib: level2_loop_functional(ya, xia, yb, xib), xa, xb
)
cf = closed_form_mixed_partial(xa, xb) - closed_form_mixed_partial(xb, xa)
print(f"phi(b) = {mp:.8e} vs antisym closed form {cf:.8e} err {abs(mp-cf):.2e} [{time.time()-t0:.1f}s]")

# direct mixed partial (not antisymmetrized) vs closed form: do it manually
step = 1e-3
offsets = (-2 * step, -step, step, 2 * step)
weights = (1.0, -8.0, 8.0, -1.0)
tot = 0.0
for oa, wa in zip(offsets, weights):
    for ob, wb in zip(offsets, weights):
        tot += wa * wb * level2_loop_functional(oa, xa, ob, xb)
tot /= (12 * step) ** 2
print(f"d2b/dy1dy2 = {tot:.8e} vs closed form {closed_form_mixed_partial(xa, xb):.8e} "
      f"err {abs(tot - closed_form_mixed_partial(xa, xb)):.2e}")

# phi(a) ~ 0
t0 = time.time()
pa = antisymmetrized_mixed_partial(
    lambda ya, xia, yb, xib: level1_loop_functional(ya, xia, yb, xib, theta_nodes=32, t_order=4),
    xa, xb,
)
print(f"phi(a) = {pa:.2e} [{time.time()-t0:.1f}s]")

# phi(a+b) vs alpha
alpha_val = loop_cocycle(xa, xb)
print(f"phi(b) vs alpha: {abs(mp - alpha_val):.2e}; phi(a)+phi(b) vs alpha: {abs(pa + mp - alpha_val):.2e}")
