import time

import numpy as np

from eulernerve.euler import builtin_cocycle, euler_component
from eulernerve.matgroup import nerve_point, random_frame, sample_haar
from eulernerve.nerve import verify_total_cocycle

rng = np.random.default_rng(1)

# generated vs builtin at p=3
t0 = time.time()
for (p, q), key in (((3, 0), (3, 3)), ((3, 1), (2, 4)), ((3, 2), (1, 5))):
    gen = euler_component(p, q)
    built = builtin_cocycle(6).components[key]
    P = nerve_point([sample_haar(6, rng) for _ in range(key[0])], n=6)
    frames = tuple(random_frame(key[0], 6, rng) for _ in range(key[1]))
    v1, v2 = gen.fn(P, frames), built.fn(P, frames)
    print(f"(p,q)=({p},{q}) vs builtin {key}: rel {abs(v1 - v2) / abs(v2):.2e}  [{time.time()-t0:.2f}s]")


def haar_sampler(level, rng):
    return nerve_point([sample_haar(6, rng) for _ in range(level)], n=6)


t0 = time.time()
report = verify_total_cocycle(
    builtin_cocycle(6), samples=3, tol=1e-4, rng=rng, point_sampler=haar_sampler
)
print("SO(6):", {k: f"{v:.2e}" for k, v in report.bidegree_residuals.items()},
      "max", f"{report.max_residual:.2e}",
      "assign", report.sign_assignment, "count", report.consistent_assignments,
      f"[{time.time()-t0:.1f}s for 3 samples]")
