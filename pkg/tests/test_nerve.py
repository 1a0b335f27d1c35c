import numpy as np
import pytest
from scipy.linalg import expm

from eulernerve.euler import builtin_cocycle
from eulernerve.forms import (
    FormEvaluator,
    lin,
    rmc,
    square,
    word,
    word_sum_form,
)
from eulernerve.matgroup import (
    nerve_point,
    random_frame,
    random_skew,
    sample_haar,
    skew_project,
    tangent_frame,
)
from eulernerve.nerve import (
    Cochain,
    d_prime,
    d_second,
    face_point,
    face_pushforward,
    verify_total_cocycle,
)


def haar_sampler(n):
    def sampler(level, rng):
        return nerve_point([sample_haar(n, rng) for _ in range(level)], n=n)

    return sampler


# ---------------------------------------------------------------------------
# face maps


def test_face_point_cases(rng):
    h1, h2 = sample_haar(4, rng), sample_haar(4, rng)
    p = nerve_point([h1, h2])
    assert np.array_equal(face_point(0, 2, p).components[0], h2)
    assert np.allclose(face_point(1, 2, p).components[0], h1 @ h2, atol=0)
    assert np.array_equal(face_point(2, 2, p).components[0], h1)


def test_face_point_index_error(rng):
    p = nerve_point([sample_haar(4, rng)])
    with pytest.raises(IndexError):
        face_point(2, 1, p)


def test_pushforward_identity_merge(rng):
    # h2 = I makes the merged tangent xi1 + xi2
    h1 = sample_haar(4, rng)
    p = nerve_point([h1, np.eye(4)])
    v = random_frame(2, 4, rng)
    out = face_pushforward(1, 2, p, v)
    assert np.allclose(out.components[0], v.components[0] + v.components[1], atol=1e-15)


def test_pushforward_abelian_so2(rng):
    p = nerve_point([sample_haar(2, rng), sample_haar(2, rng)])
    v = random_frame(2, 2, rng)
    out = face_pushforward(1, 2, p, v)
    assert np.max(np.abs(out.components[0] - (v.components[0] + v.components[1]))) < 1e-15


def test_pushforward_matches_finite_differences(rng):
    q, n = 3, 4
    p = nerve_point([sample_haar(n, rng) for _ in range(q)])
    v = random_frame(q, n, rng)
    step = 1e-5
    for i in range(q + 1):
        exact = face_pushforward(i, q, p, v)
        plus = face_point(i, q, nerve_point(
            [h @ expm(step * xi) for h, xi in zip(p.components, v.components)], n=n))
        minus = face_point(i, q, nerve_point(
            [h @ expm(-step * xi) for h, xi in zip(p.components, v.components)], n=n))
        base = face_point(i, q, p)
        for k in range(q - 1):
            fd = skew_project(
                base.components[k].T @ (plus.components[k] - minus.components[k]) / (2 * step)
            )
            assert np.max(np.abs(fd - exact.components[k])) < 1e-8


def test_simplicial_identities(rng):
    # eps_i o eps_j = eps_{j-1} o eps_i for i < j, points and pushforwards
    q, n = 3, 4
    p = nerve_point([sample_haar(n, rng) for _ in range(q)])
    v = random_frame(q, n, rng)
    for j in range(1, q + 1):
        for i in range(j):
            p1 = face_point(i, q - 1, face_point(j, q, p))
            p2 = face_point(j - 1, q - 1, face_point(i, q, p))
            for a, b in zip(p1.components, p2.components):
                assert np.max(np.abs(a - b)) < 1e-12
            v1 = face_pushforward(i, q - 1, face_point(j, q, p), face_pushforward(j, q, p, v))
            v2 = face_pushforward(j - 1, q - 1, face_point(i, q, p), face_pushforward(i, q, p, v))
            for a, b in zip(v1.components, v2.components):
                assert np.max(np.abs(a - b)) < 1e-12


# ---------------------------------------------------------------------------
# differentials


def test_d_prime_zero_form_expansion(rng):
    # (d'f)(h1, h2) = f(h2) - f(h1 h2) + f(h1), checked with a trace
    f = FormEvaluator(1, 0, lambda p, v: float(np.trace(p.components[0])))
    df = d_prime(f)
    h1, h2 = sample_haar(4, rng), sample_haar(4, rng)
    val = df.fn(nerve_point([h1, h2]), ())
    expect = np.trace(h2) - np.trace(h1 @ h2) + np.trace(h1)
    assert abs(val - expect) < 1e-13


def test_d_prime_squared_zero_forms(rng):
    m = random_skew(4, rng)
    f = FormEvaluator(1, 0, lambda p, v: float(np.trace(m @ p.components[0])))
    dd = d_prime(d_prime(f))
    for _ in range(5):
        p = haar_sampler(4)(3, rng)
        assert abs(dd.fn(p, ())) < 1e-9


def test_d_prime_squared_one_forms(rng):
    omega = word_sum_form(1, 4, [word(1.0, [lin(rmc(1)), square(rmc(1))])])
    dd = d_prime(d_prime(omega))
    for _ in range(3):
        p = haar_sampler(4)(3, rng)
        frames = tuple(random_frame(3, 4, rng) for _ in range(3))
        assert abs(dd.fn(p, frames)) < 1e-9


def test_d_second_sign():
    # even level: d'' = +d; odd level: d'' = -d
    calls = []

    def fn(p, v):
        return float(np.trace(p.components[0]))

    f1 = FormEvaluator(1, 0, fn)
    f2 = FormEvaluator(2, 0, lambda p, v: float(np.trace(p.components[0])))
    rng = np.random.default_rng(0)
    p1 = nerve_point([sample_haar(4, rng)])
    v1 = (random_frame(1, 4, rng),)
    from eulernerve.forms import exterior_derivative

    assert d_second(f1).fn(p1, v1) == pytest.approx(-exterior_derivative(f1).fn(p1, v1))
    p2 = nerve_point([sample_haar(4, rng), sample_haar(4, rng)])
    v2 = (random_frame(2, 4, rng),)
    assert d_second(f2).fn(p2, v2) == pytest.approx(exterior_derivative(f2).fn(p2, v2))


def test_anticommutation(rng):
    omega = word_sum_form(1, 4, [word(0.5, [lin(rmc(1)), lin(rmc(1))])])
    # degree-2 word of two linear factors
    anti = d_second(d_prime(omega))
    comm = d_prime(d_second(omega))
    for _ in range(3):
        p = haar_sampler(4)(2, rng)
        frames = tuple(random_frame(2, 4, rng) for _ in range(3))
        assert abs(anti.fn(p, frames) + comm.fn(p, frames)) < 1e-5


# ---------------------------------------------------------------------------
# total-cocycle verification


def test_verify_so4_cochain(rng):
    report = verify_total_cocycle(
        builtin_cocycle(4),
        samples=5,
        tol=1e-5,
        rng=rng,
        point_sampler=haar_sampler(4),
    )
    assert report.passed
    assert report.max_residual < 1e-5
    assert report.consistent_assignments == 1
    assert report.sign_assignment == {"1,3": 1, "2,2": 1}


def test_verify_so2_cochain(rng):
    report = verify_total_cocycle(
        builtin_cocycle(2),
        samples=10,
        tol=1e-9,
        rng=rng,
        point_sampler=haar_sampler(2),
    )
    assert report.passed


def test_verify_detects_perturbation(rng):
    from eulernerve.forms import scale_form

    base = builtin_cocycle(4)
    tampered = Cochain(
        n=4,
        components={
            (1, 3): scale_form(1.01, base.components[(1, 3)]),
            (2, 2): base.components[(2, 2)],
        },
    )
    report = verify_total_cocycle(
        tampered, samples=5, tol=1e-5, rng=rng, point_sampler=haar_sampler(4),
        frame_norm=2.5,
    )
    assert not report.passed
    assert report.max_residual > 100 * 1e-5
    # and no sign flip can repair a scaled component
    assert report.consistent_assignments == 0
    # the unperturbed cochain stays far below tolerance on the same frames
    clean = verify_total_cocycle(
        base, samples=5, tol=1e-5, rng=np.random.default_rng(99),
        point_sampler=haar_sampler(4), frame_norm=2.5,
    )
    assert clean.max_residual < 1e-8


def test_verify_workers_deterministic():
    r1 = verify_total_cocycle(
        builtin_cocycle(4), samples=4, tol=1e-5,
        rng=np.random.default_rng(5), point_sampler=haar_sampler(4), workers=1,
    )
    r2 = verify_total_cocycle(
        builtin_cocycle(4), samples=4, tol=1e-5,
        rng=np.random.default_rng(5), point_sampler=haar_sampler(4), workers=3,
    )
    assert r1.bidegree_residuals == r2.bidegree_residuals


def test_cochain_validates_bidegrees():
    bad = builtin_cocycle(4).components[(1, 3)]
    with pytest.raises(ValueError):
        Cochain(n=4, components={(2, 2): bad})


def test_report_json_roundtrip(rng):
    report = verify_total_cocycle(
        builtin_cocycle(2), samples=2, tol=1e-6, rng=rng, point_sampler=haar_sampler(2)
    )
    import json

    blob = json.dumps(report.to_json())
    assert json.loads(blob)["pass"] is True
