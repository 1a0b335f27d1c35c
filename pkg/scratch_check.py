"""Scratch: validate core conventions before building the rest."""
import numpy as np

from eulernerve.euler import (
    builtin_cocycle,
    clutching_euler_number,
    diagonal_cochain,
    edge_cochain,
    euler_component,
    euler_pfaffian,
    phi_pullback_variants,
)
from eulernerve.matgroup import nerve_point, random_frame, random_skew, sample_haar, tangent_frame
from eulernerve.nerve import verify_total_cocycle
from eulernerve.forms import exterior_derivative, lmc, rmc, lin, word, word_sum_form, generator_value

rng = np.random.default_rng(0)

# 1. Pfaffian
for n in (2, 4, 6):
    a = random_skew(n, rng)
    p = n // 2
    lhs = ((2 * np.pi) ** p * euler_pfaffian(a)) ** 2
    rhs = np.linalg.det(a)
    print(f"pf^2=det n={n}: rel err {abs(lhs - rhs) / max(abs(rhs), 1e-30):.2e}")

# 2. SO(2) winding
for k in (0, 2, -3):
    print(f"winding {k}: {clutching_euler_number(k):.12f}")

# 3. Maurer-Cartan structure equation (left): d theta + theta^theta = 0
n = 4
P1 = nerve_point([sample_haar(n, rng)])
# use entry (1,2) of lmc as scalar 1-form via a direct evaluator
from eulernerve.forms import FormEvaluator

def entry_form(gen, a, b, level=1):
    return FormEvaluator(level, 1, lambda p, v: float(generator_value(gen, p, v[0])[a, b]))

theta12 = entry_form(lmc(1), 0, 1)
dth = exterior_derivative(theta12)
X = random_frame(1, n, rng)
Y = random_frame(1, n, rng)
lhs = dth.fn(P1, (X, Y))
# (theta^theta)_{12}(X,Y) = [theta(X), theta(Y)]_{12}
commut = X.components[0] @ Y.components[0] - Y.components[0] @ X.components[0]
print(f"MC left residual: {abs(lhs + commut[0,1]):.2e}")

kappa12 = entry_form(rmc(1), 0, 1)
dk = exterior_derivative(kappa12)
lhs = dk.fn(P1, (X, Y))
h = P1.components[0]
kx = h @ X.components[0] @ h.T
ky = h @ Y.components[0] @ h.T
commut = kx @ ky - ky @ kx
print(f"MC right residual: {abs(lhs - commut[0,1]):.2e}")

# 4. edge/diagonal vs builtin at p=2
e13_gen = euler_component(2, 1)
e13_built = builtin_cocycle(4).components[(1, 3)]
P = nerve_point([sample_haar(4, rng)])
frames = tuple(random_frame(1, 4, rng) for _ in range(3))
v1, v2 = e13_gen.fn(P, frames), e13_built.fn(P, frames)
print(f"e13 gen vs builtin: {v1:.6e} {v2:.6e} rel {abs(v1-v2)/abs(v2):.2e}")

e22_gen = euler_component(2, 0)
e22_built = builtin_cocycle(4).components[(2, 2)]
P2 = nerve_point([sample_haar(4, rng), sample_haar(4, rng)])
frames2 = tuple(random_frame(2, 4, rng) for _ in range(2))
v1, v2 = e22_gen.fn(P2, frames2), e22_built.fn(P2, frames2)
print(f"e22 gen vs builtin: {v1:.6e} {v2:.6e} rel {abs(v1-v2)/abs(v2):.2e}")

edge2 = edge_cochain(2)
v3 = edge2.fn(P, frames)
print(f"edge_cochain(2) vs builtin e13: rel {abs(v3-e13_built.fn(P,frames))/abs(v3):.2e}")
diag2 = diagonal_cochain(2)
v4 = diag2.fn(P2, frames2)
print(f"diagonal_cochain(2) vs builtin e22: rel {abs(v4-v2)/abs(v4):.2e}")

# 5. SO(4) cocycle condition!
def haar_sampler(level, rng):
    return nerve_point([sample_haar(4, rng) for _ in range(level)], n=4)

report = verify_total_cocycle(
    builtin_cocycle(4), samples=5, tol=1e-5, rng=rng, point_sampler=haar_sampler
)
print("SO(4) cocycle:", report.bidegree_residuals, "max", report.max_residual,
      "assignment", report.sign_assignment, "count", report.consistent_assignments)

# 6. pullback variant audit
res = phi_pullback_variants(1, 1, 5, rng)
print("phi pullback s=1,q=1:", {k: f"{v:.2e}" for k, v in res.items()})
res = phi_pullback_variants(2, 2, 5, rng)
print("phi pullback s=2,q=2:", {k: f"{v:.2e}" for k, v in res.items()})
