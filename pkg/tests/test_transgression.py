import numpy as np
import pytest

from eulernerve.euler import builtin_cocycle
from eulernerve.matgroup import (
    DomainError,
    exp_alg,
    identity_point,
    log_grp,
    nerve_point,
    random_frame,
    sample_near_identity,
)
from eulernerve.transgression import (
    ContractionKind,
    contraction,
    level_map,
    local_cochain,
    transgression_form,
    truncated_cocycle_report,
)

CONE = ContractionKind.CONE
EXPLICIT = ContractionKind.EXPLICIT


def near(rng, radius=0.1):
    return sample_near_identity(4, radius, rng)


# ---------------------------------------------------------------------------
# contraction maps


def test_sigma1_cone_equals_explicit(rng):
    h = near(rng, 0.3)
    t = rng.dirichlet(np.ones(2))
    a = contraction(CONE, 1, t, [h])
    b = contraction(EXPLICIT, 1, t, [h])
    assert np.max(np.abs(a - b)) < 1e-13
    assert np.max(np.abs(a - exp_alg(t[1] * log_grp(h)))) < 1e-13


def test_cone_apex_is_identity(rng):
    h1, h2 = near(rng), near(rng)
    val = contraction(CONE, 2, [1.0, 0.0, 0.0], [h1, h2])
    assert np.array_equal(val, np.eye(4))


@pytest.mark.parametrize("l", [2, 3])
def test_cone_face_compatibility_all_faces(l, rng):
    # restricting to the j-th face of the simplex matches the contraction of
    # the j-th nerve face (j >= 1) or left translation by h_1 (j = 0)
    worst = 0.0
    for _ in range(5):
        hs = [near(rng) for _ in range(l)]
        t = rng.dirichlet(np.ones(l))
        for j in range(l + 1):
            te = np.insert(t, j, 0.0)
            lhs = contraction(CONE, l, te, hs)
            if j == 0:
                rhs = hs[0] @ (
                    contraction(CONE, l - 1, t, hs[1:]) if l > 1 else np.eye(4)
                )
            elif j < l:
                merged = hs[: j - 1] + [hs[j - 1] @ hs[j]] + hs[j + 1 :]
                rhs = contraction(CONE, l - 1, t, merged)
            else:
                rhs = contraction(CONE, l - 1, t, hs[:-1])
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    assert worst < 1e-10


def test_explicit_sigma2_violates_middle_face(rng):
    # the first-order variant fails the j = 1 compatibility for noncommuting
    # inputs; this is the reason it is never used in the cocycle check
    h1, h2 = near(rng, 0.3), near(rng, 0.3)
    t = np.array([0.4, 0.6])
    te = np.insert(t, 1, 0.0)
    lhs = contraction(EXPLICIT, 2, te, [h1, h2])
    rhs = contraction(EXPLICIT, 1, t, [h1 @ h2])
    assert np.max(np.abs(lhs - rhs)) > 1e-6


def test_explicit_sigma2_outer_faces_ok(rng):
    h1, h2 = near(rng, 0.3), near(rng, 0.3)
    t = rng.dirichlet(np.ones(2))
    lhs = contraction(EXPLICIT, 2, np.insert(t, 0, 0.0), [h1, h2])
    rhs = h1 @ contraction(EXPLICIT, 1, t, [h2])
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    lhs = contraction(EXPLICIT, 2, np.insert(t, 2, 0.0), [h1, h2])
    rhs = contraction(EXPLICIT, 1, t, [h1])
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_contraction_argument_counts(rng):
    with pytest.raises(ValueError):
        contraction(CONE, 2, [1.0, 0.0], [near(rng), near(rng)])
    with pytest.raises(ValueError):
        contraction(CONE, 2, [0.5, 0.3, 0.2], [near(rng)])


def test_contraction_domain_error():
    g = exp_alg((np.pi - 1e-9) * np.array([[0.0, -1.0], [1.0, 0.0]]))
    g4 = np.eye(4)
    g4[:2, :2] = g
    with pytest.raises(DomainError):
        contraction(CONE, 1, [0.5, 0.5], [g4])


# ---------------------------------------------------------------------------
# level maps


def test_level_map_passthrough(rng):
    h1, h2 = near(rng), near(rng)
    t = rng.dirichlet(np.ones(2))
    point = level_map(2, 1, t, [h1, h2])
    assert np.array_equal(point.components[0], h1)
    assert np.max(np.abs(point.components[1] - contraction(CONE, 1, t, [h2]))) == 0.0


def test_level_map_full_contraction(rng):
    h1, h2 = near(rng), near(rng)
    t = rng.dirichlet(np.ones(3))
    point = level_map(1, 2, t, [h1, h2])
    assert point.level == 1
    assert np.max(np.abs(point.components[0] - contraction(CONE, 2, t, [h1, h2]))) == 0.0


# ---------------------------------------------------------------------------
# fiber-integrated forms


def test_beta_degree_bookkeeping():
    comps = builtin_cocycle(4).components
    mu1, mu2 = comps[(1, 3)], comps[(2, 2)]
    b21 = transgression_form(mu2, 2, 1, quad_order=4)
    b12 = transgression_form(mu1, 1, 2, quad_order=4)
    b22 = transgression_form(mu2, 2, 2, quad_order=4)
    b13 = transgression_form(mu1, 1, 3, quad_order=4)
    assert (b21.level, b21.degree) == (2, 1)
    assert (b12.level, b12.degree) == (2, 1)
    assert (b22.level, b22.degree) == (3, 0)
    assert (b13.level, b13.degree) == (3, 0)


def test_beta_vanishes_on_identity_inputs(rng):
    comps = builtin_cocycle(4).components
    b21 = transgression_form(comps[(2, 2)], 2, 1, quad_order=4)
    val = b21.fn(identity_point(4, 2), (random_frame(2, 4, rng),))
    assert val == 0.0
    b13 = transgression_form(comps[(1, 3)], 1, 3, quad_order=4)
    assert b13.fn(identity_point(4, 3), ()) == 0.0


def test_beta_quadrature_order_doubling(rng):
    comps = builtin_cocycle(4).components
    lo = transgression_form(comps[(2, 2)], 2, 1, quad_order=8)
    hi = transgression_form(comps[(2, 2)], 2, 1, quad_order=16)
    p = nerve_point([near(rng), near(rng)])
    v = (random_frame(2, 4, rng),)
    assert abs(lo.fn(p, v) - hi.fn(p, v)) < 1e-9


# ---------------------------------------------------------------------------
# the truncated cocycle


def test_truncated_cocycle_residuals(rng):
    rep = truncated_cocycle_report(samples=3, tol=1e-3, rng=rng)
    assert rep.passed
    assert rep.eta0_residual < 1e-3
    assert rep.eta1_residual < 1e-3
    assert rep.quad_convergence < 1e-6


def test_truncated_cocycle_identity_sample(rng):
    lc = local_cochain()
    assert lc.eta0.fn(identity_point(4, 3), ()) == 0.0
    assert lc.eta1.fn(identity_point(4, 2), (random_frame(2, 4, rng),)) == 0.0


def test_perturbed_component_detected(rng):
    # a 1% perturbation of one fiber-integrated component must grow the
    # degree-1 residual by far more than 10x (the balance is exact; the clean
    # residual is pure finite-difference noise)
    baseline = truncated_cocycle_report(
        samples=3, tol=1e-3, rng=np.random.default_rng(7), check_convergence=False
    )
    tampered = truncated_cocycle_report(
        samples=3, tol=1e-3, rng=np.random.default_rng(7),
        beta21_scale=1.01, check_convergence=False,
    )
    assert tampered.eta1_residual > 10 * max(baseline.eta1_residual, 1e-12)
    assert tampered.eta1_residual > 1e3 * baseline.eta1_residual
