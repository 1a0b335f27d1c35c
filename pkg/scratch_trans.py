import time

import numpy as np

from eulernerve.matgroup import identity_point, nerve_point, random_frame, sample_near_identity
from eulernerve.transgression import (
    ContractionKind,
    contraction,
    local_cochain,
    truncated_cocycle_report,
)

rng = np.random.default_rng(2)

# cone simplicial compatibility, l = 2, 3, all faces
for l in (2, 3):
    worst = 0.0
    for _ in range(4):
        hs = [sample_near_identity(4, 0.1, rng) for _ in range(l)]
        t = rng.dirichlet(np.ones(l))  # barycentric on the face domain Delta^{l-1}
        for j in range(l + 1):
            te = np.insert(t, j, 0.0)
            lhs = contraction(ContractionKind.CONE, l, te, hs)
            if j == 0:
                inner = contraction(ContractionKind.CONE, l - 1, t, hs[1:])
                rhs = hs[0] @ inner
            else:
                if j < l:
                    merged = hs[: j - 1] + [hs[j - 1] @ hs[j]] + hs[j + 1 :]
                else:
                    merged = hs[:-1]
                rhs = contraction(ContractionKind.CONE, l - 1, t, merged)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    print(f"cone compatibility l={l}: {worst:.2e}")

# explicit variant violates the middle face
hs = [sample_near_identity(4, 0.3, rng) for _ in range(2)]
t = rng.dirichlet(np.ones(2))
te = np.insert(t, 1, 0.0)
lhs = contraction(ContractionKind.EXPLICIT, 2, te, hs)
rhs = contraction(ContractionKind.EXPLICIT, 1, t, [hs[0] @ hs[1]])
print(f"explicit middle-face defect (should be visible): {np.max(np.abs(lhs - rhs)):.2e}")

# eta residuals
t0 = time.time()
rep = truncated_cocycle_report(samples=3, tol=1e-3, rng=rng, check_convergence=True)
print(
    f"eta0 {rep.eta0_residual:.2e} eta1 {rep.eta1_residual:.2e} "
    f"conv {rep.quad_convergence:.2e} pass {rep.passed} [{time.time()-t0:.1f}s]"
)

# identity inputs -> exact zeros
lc = local_cochain()
print("eta0 at identity:", lc.eta0.fn(identity_point(4, 3), ()))
print("eta1 at identity:", lc.eta1.fn(identity_point(4, 2), (random_frame(2, 4, rng),)))
