import json
import math

import numpy as np
import pytest

from hyperlyap.cayley_sign import cayley
from hyperlyap.disks import Eta, d_inv, eta_of_point, half_iteration
from hyperlyap.errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotInSetError,
    NotIsometryFamilyError,
    NotPositiveDefiniteError,
    NotStableError,
    SingularBaseError,
    SingularMatrixError,
)
from hyperlyap.inclusions import (
    Kind,
    build_qmi,
    convex_combination_check,
    eta_star_lyapunov,
    eta_star_stein,
    evaluate_qmi,
    half_step_eta_check,
    half_step_target,
    inversion_closure_check,
    is_member,
    is_member_batch,
    isometry_combination,
    matrix_convex_combination_check,
    product_contractivity_check,
    similarity_transport,
    solve_lyapunov,
    stein_norm_form,
    synthesize_certificate,
)
from hyperlyap.linalg import Mode, sqrt_pd, inv_sqrt_pd
from hyperlyap.sampling import (
    complex_gaussian,
    make_rng,
    random_hermitian_nonsingular,
    random_isometry_family,
    random_pd,
    random_unitary,
    random_with_norm,
    sample_lyapunov_member,
    sample_stein_member,
)

I2 = np.eye(2)


def member(kind, base, a, eta=None, mode=Mode.OPEN):
    return is_member(build_qmi(kind, base, eta), a, mode)[0]


# ---- QMI construction -------------------------------------------------------

def test_build_lyapunov_table():
    spec = build_qmi(Kind.LYAPUNOV, I2)
    np.testing.assert_array_equal(spec.m, np.block([[0 * I2, I2], [I2, 0 * I2]]))
    np.testing.assert_allclose(np.linalg.eigvalsh(spec.m), [-1, -1, 1, 1])
    assert spec.signature == (2, 2)
    assert spec.eta.is_infinite


def test_build_hyper_table():
    p = np.diag([2.0, 3.0])
    np.testing.assert_array_equal(build_qmi("hyper-lyapunov", I2, "inf").m,
                                  build_qmi("lyapunov", I2).m)
    np.testing.assert_allclose(build_qmi(Kind.HYPER_STEIN, I2, 2.0).m, np.diag([-1, -1, 1 / 3, 1 / 3]))
    m = build_qmi(Kind.HYPER_LYAPUNOV, p, 4.0).m
    np.testing.assert_allclose(m, np.block([[-p / 4, p], [p, -p / 4]]))
    np.testing.assert_allclose(build_qmi(Kind.STEIN, p).m, np.block([[-p, 0 * p], [0 * p, p]]))
    spec = build_qmi(Kind.STEIN, p)
    np.testing.assert_allclose(spec.w, -p)
    np.testing.assert_allclose(spec.y, p)
    np.testing.assert_allclose(spec.r, 0 * p)


def test_kind_parse():
    assert Kind.parse("lyap") is Kind.LYAPUNOV
    assert Kind.parse("Hyper_Stein") is Kind.HYPER_STEIN
    assert Kind.parse("hyper-lyap") is Kind.HYPER_LYAPUNOV
    with pytest.raises(ValueError):
        Kind.parse("riccati")


def test_build_errors():
    with pytest.raises(NotHermitianError):
        build_qmi(Kind.LYAPUNOV, np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefiniteError):
        build_qmi(Kind.HYPER_STEIN, np.diag([1.0, -1.0]), 2.0)
    with pytest.raises(SingularBaseError):
        build_qmi(Kind.LYAPUNOV, np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        build_qmi(Kind.HYPER_LYAPUNOV, I2)
    # indefinite hyper bases are allowed when asked for explicitly
    spec = build_qmi(Kind.HYPER_STEIN, np.diag([1.0, -1.0]), 2.0, require_pd=False)
    assert spec.signature == (2, 2)


def test_classical_kind_accepts_indefinite_base():
    h = np.diag([1.0, -2.0])
    spec = build_qmi(Kind.LYAPUNOV, h)
    a = np.diag([1.0, -1.0])
    np.testing.assert_allclose(evaluate_qmi(spec, a), h @ a + a.conj().T @ h)
    assert is_member(spec, a)[0]


# ---- evaluation and membership ----------------------------------------------

def test_evaluate_qmi(rng):
    h = random_hermitian_nonsingular(rng, 3)
    p = random_pd(rng, 3)
    a = complex_gaussian(rng, 3)
    ah = a.conj().T
    np.testing.assert_allclose(evaluate_qmi(build_qmi(Kind.LYAPUNOV, h), a), h @ a + ah @ h, atol=1e-12)
    np.testing.assert_allclose(evaluate_qmi(build_qmi(Kind.STEIN, h), np.zeros((3, 3))), h, atol=1e-15)
    q = evaluate_qmi(build_qmi(Kind.HYPER_LYAPUNOV, p, 3.0), a)
    np.testing.assert_allclose(q, -(ah @ p @ a + p) / 3 + p @ a + ah @ p, atol=1e-12)
    q = evaluate_qmi(build_qmi(Kind.HYPER_STEIN, p, 3.0), a)
    np.testing.assert_allclose(q, 0.5 * p - ah @ p @ a, atol=1e-12)
    assert np.array_equal(q, q.conj().T)
    with pytest.raises(DimensionMismatchError):
        evaluate_qmi(build_qmi(Kind.LYAPUNOV, h), np.eye(2))


def test_membership_examples():
    ok, cert = is_member(build_qmi(Kind.LYAPUNOV, I2), I2)
    assert ok and cert.min_eig_slack == pytest.approx(2.0) and cert.strict
    np.testing.assert_allclose(cert.slack, 2 * I2)
    eta = 3.0
    c = d_inv(eta).center + 0.5 * d_inv(eta).radius * np.exp(0.7j)
    assert member(Kind.HYPER_LYAPUNOV, I2, c * I2, eta)
    assert member(Kind.HYPER_STEIN, I2, 0.5 * I2, 2.0)
    assert not member(Kind.HYPER_STEIN, I2, 0.6 * I2, 2.0)
    assert not member(Kind.LYAPUNOV, I2, -I2)


def test_open_closed_boundary():
    r = math.sqrt(1 / 3)
    spec = build_qmi(Kind.HYPER_STEIN, I2, 2.0)
    assert not is_member(spec, r * I2, Mode.OPEN)[0]
    ok, cert = is_member(spec, r * I2, Mode.CLOSED)
    assert ok and not cert.strict


def test_certificate_json():
    _, cert = is_member(build_qmi(Kind.HYPER_STEIN, I2, 2.0), 0.5 * I2)
    doc = json.loads(json.dumps(cert.to_dict()))
    assert doc["kind"] == "hyper-stein" and doc["eta"] == 2.0 and doc["strict"] is True
    assert doc["base"]["rows"] == 2 and len(doc["slack"]["data"]) == 4
    _, cert = is_member(build_qmi(Kind.STEIN, I2), 0.5 * I2)
    assert cert.to_dict()["eta"] == "inf"


def test_batch_membership_agrees(rng):
    spec = build_qmi(Kind.HYPER_STEIN, np.eye(3), 2.0)
    mats = np.stack([random_with_norm(rng, 3, rng.uniform(0.4, 0.75)) for _ in range(200)])
    members, mins = is_member_batch(spec, mats, Mode.CLOSED)
    for a, ok, lam in zip(mats, members, mins):
        single_ok, cert = is_member(spec, a, Mode.CLOSED)
        assert ok == single_ok
        assert lam == pytest.approx(cert.min_eig_slack, abs=1e-12)
    assert 0 < members.sum() < len(members)
    with pytest.raises(DimensionMismatchError):
        is_member_batch(spec, np.zeros((2, 2, 2)))


# ---- Stein norm form and eta thresholds --------------------------------------

def test_stein_norm_form(rng):
    a = complex_gaussian(rng, 3)
    assert stein_norm_form(np.eye(3), a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-12)
    assert stein_norm_form(random_pd(rng, 3), (0.3 + 0.4j) * np.eye(3)) == pytest.approx(0.5, rel=1e-12)


def test_stein_norm_form_dual_oracle():
    rng = make_rng(21)
    eta = 3.0
    radius = math.sqrt(0.5)
    agree = 0
    for _ in range(500):
        p = random_pd(rng, 4)
        a = inv_sqrt_pd(p) @ random_with_norm(rng, 4, radius * rng.uniform(0.8, 1.2)) @ sqrt_pd(p)
        s = stein_norm_form(p, a)
        if abs(s - radius) < 1e-9:
            continue
        agree += member(Kind.HYPER_STEIN, p, a, eta) == (s < radius)
    assert agree >= 499


def test_eta_star_lyapunov_examples():
    assert eta_star_lyapunov(I2, 2 * I2) == pytest.approx(1.25)
    assert eta_star_lyapunov(I2, I2) == pytest.approx(1.0)
    for c in (0.3, 1.7, 4.0):
        assert eta_star_lyapunov(np.eye(3), c * np.eye(3)) == pytest.approx(eta_of_point(c), rel=1e-13)
    with pytest.raises(NotInSetError):
        eta_star_lyapunov(I2, -I2)
    with pytest.raises(NotPositiveDefiniteError):
        eta_star_lyapunov(np.diag([1.0, -1.0]), I2)


def test_eta_star_at_least_one():
    rng = make_rng(5)
    for _ in range(100):
        p = random_pd(rng, 3)
        a = sample_lyapunov_member(rng, p, rng.uniform(1.2, 20))
        assert eta_star_lyapunov(p, a) >= 1 - 1e-12


def test_eta_star_is_threshold():
    rng = make_rng(6)
    for _ in range(30):
        p = random_pd(rng, 3)
        a = sample_lyapunov_member(rng, p, rng.uniform(1.5, 10))
        rho = eta_star_lyapunov(p, a)
        for k in (1, 2, 5, 20):
            delta = 1e-4 * k
            assert member(Kind.HYPER_LYAPUNOV, p, a, rho * (1 + delta), Mode.CLOSED)
            if rho * (1 - delta) > 1:
                assert not member(Kind.HYPER_LYAPUNOV, p, a, rho * (1 - delta), Mode.CLOSED)


def test_eta_star_similarity_consistency():
    rng = make_rng(8)
    for _ in range(50):
        p = random_pd(rng, 4)
        a = sample_lyapunov_member(rng, p, 4.0)
        transported = sqrt_pd(p) @ a @ inv_sqrt_pd(p)
        assert eta_star_lyapunov(p, a) == pytest.approx(eta_star_lyapunov(np.eye(4), transported), abs=1e-10)


def test_eta_star_stein_examples():
    assert eta_star_stein(I2, np.zeros((2, 2))) == 1.0
    a = random_with_norm(make_rng(1), 3, 1 / math.sqrt(3))
    assert eta_star_stein(np.eye(3), a) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(NotInSetError):
        eta_star_stein(I2, 1.5 * I2)


def test_eta_star_cayley_consistency():
    rng = make_rng(9)
    for _ in range(200):
        p = random_pd(rng, 3)
        a = sample_stein_member(rng, p, rng.uniform(1.1, 30))
        assert eta_star_stein(p, a) == pytest.approx(eta_star_lyapunov(p, cayley(a)), rel=1e-9)


# ---- Lyapunov solve and certificates ----------------------------------------

def test_solve_lyapunov_examples():
    np.testing.assert_allclose(solve_lyapunov(I2, 2 * I2), I2, atol=1e-15)
    np.testing.assert_allclose(solve_lyapunov(np.diag([1.0, 2.0]), I2), np.diag([0.5, 0.25]), atol=1e-15)


def test_solve_lyapunov_random(rng):
    for n in (1, 3, 6, 10):
        b = complex_gaussian(rng, n)
        a = b + (np.linalg.norm(b, 2) + 0.1) * np.eye(n)
        p = solve_lyapunov(a, np.eye(n))
        assert np.linalg.norm(p @ a + a.conj().T @ p - np.eye(n)) <= 1e-9 * math.sqrt(n)
        assert np.linalg.eigvalsh(p).min() > 0


def test_solve_lyapunov_errors():
    with pytest.raises(SingularMatrixError):
        solve_lyapunov(np.array([[0.0, 1.0], [-1.0, 0.0]]), I2)
    with pytest.raises(DimensionMismatchError):
        solve_lyapunov(I2, np.eye(3))
    with pytest.raises(ValueError):
        solve_lyapunov(np.eye(31), np.eye(31))


def test_synthesize_examples():
    p, eta = synthesize_certificate(I2)
    np.testing.assert_allclose(p, I2 / 2, atol=1e-15)
    assert eta == pytest.approx(1.0)
    p, eta = synthesize_certificate(np.diag([2.0, 3.0]))
    np.testing.assert_allclose(p, np.diag([0.25, 1 / 6]), atol=1e-15)
    assert eta == pytest.approx(5 / 3)
    for bad in (np.array([[0.0, 1.0], [-1.0, 0.0]]), np.diag([1.0, -1.0])):
        with pytest.raises(NotStableError):
            synthesize_certificate(bad)


def test_synthesized_certificate_is_strict_above_eta(rng):
    for _ in range(20):
        b = complex_gaussian(rng, 3)
        a = b + (np.linalg.norm(b, 2) + 0.2) * np.eye(3)
        p, eta = synthesize_certificate(a)
        assert member(Kind.HYPER_LYAPUNOV, p, a, eta * 1.001)
        assert member(Kind.HYPER_LYAPUNOV, p, a, eta, Mode.CLOSED)


# ---- structural properties ----------------------------------------------------

def test_half_step_examples():
    for c in (1.5, 3.0, 7.0):
        eta = eta_of_point(c)
        assert eta_of_point(0.5 * (c + 1 / c)) == pytest.approx(half_iteration(eta).value, rel=1e-14)
        assert half_step_eta_check(c * I2, I2, eta)
    for eta in (1.01, 2.0, 50.0):
        assert half_step_eta_check(I2, I2, eta)
    with pytest.raises(ValueError):
        half_step_eta_check(-I2, I2, 2.0)


def test_half_step_theta_extension():
    assert half_step_target(2.0).value == 1.25
    assert half_step_target(2.0, 1.0).value == pytest.approx(2.0)
    assert half_step_target(2.0, 0.3).value == pytest.approx(0.7 * 2 + 0.3 / 2)
    rng = make_rng(13)
    for _ in range(100):
        p = random_pd(rng, 3)
        eta = rng.uniform(1.2, 10)
        a = sample_lyapunov_member(rng, p, eta)
        theta = rng.uniform()
        assert half_step_eta_check(a, p, eta, theta)
    with pytest.raises(ValueError):
        half_step_target(2.0, 1.5)


def test_similarity_transport_examples(rng):
    p = random_pd(rng, 3)
    np.testing.assert_allclose(similarity_transport(p, p), np.eye(3), atol=1e-12)
    np.testing.assert_allclose(similarity_transport(I2, np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    with pytest.raises(DimensionMismatchError):
        similarity_transport(I2, np.eye(3))


def test_product_contractivity():
    eta = 3.0
    r = math.sqrt(0.5)
    assert product_contractivity_check(I2, r * I2, eta, r * I2, eta)
    assert product_contractivity_check(I2, r * I2, eta, np.zeros((2, 2)), 1.5)
    # the scalar product sits on the boundary of the product disk
    ok, cert = is_member(build_qmi(Kind.HYPER_STEIN, I2, half_iteration(eta)), r * r * I2, Mode.CLOSED)
    assert ok and abs(cert.min_eig_slack) < 1e-12
    rng = make_rng(14)
    for _ in range(200):
        p = random_pd(rng, 3)
        ea, eb = rng.uniform(1.1, 20, 2)
        a = sample_stein_member(rng, p, ea, margin=0.0)
        b = sample_stein_member(rng, p, eb, margin=0.0)
        assert product_contractivity_check(p, a, ea, b, eb)


def test_convex_combination_examples():
    eta = 2.5
    a0, a1 = 2.0 * I2, 1.2 * I2
    for theta in (0.0, 1.0, 0.4):
        assert convex_combination_check(I2, eta, a0, a1, theta)


def test_inversion_closure():
    for c in (2.0, 0.5 + 0.3j):
        eta = eta_of_point(c) * 1.01
        assert eta_of_point(1 / c) == pytest.approx(eta_of_point(c), rel=1e-14)
        assert inversion_closure_check(I2, eta, c * I2)
    rng = make_rng(15)
    u = random_unitary(rng, 3)
    h = (u * np.array([0.5, 1.0, 2.0])) @ u.conj().T
    assert inversion_closure_check(np.eye(3), 2.0, h)
    for _ in range(100):
        p = random_pd(rng, 3)
        eta = rng.uniform(1.1, 10)
        assert inversion_closure_check(p, eta, sample_lyapunov_member(rng, p, eta))


def test_isometry_combination_rejects_non_isometry(rng):
    vs = random_isometry_family(rng, 3, [2, 2])
    with pytest.raises(NotIsometryFamilyError):
        isometry_combination([np.eye(2), np.eye(2)], [vs[0], 1.1 * vs[1]])
    with pytest.raises(DimensionMismatchError):
        isometry_combination([np.eye(3)], [vs[0]])
    with pytest.raises(ValueError):
        random_isometry_family(rng, 3, [1, 1])


def test_matrix_convex_examples(rng):
    u = random_unitary(rng, 3)
    a = sample_stein_member(rng, np.eye(3), 2.0)
    assert matrix_convex_combination_check(Kind.HYPER_STEIN, 2.0, [a], [u])
    # unitary column split with scalar blocks
    vs = [u[:1, :], u[1:, :]]
    mats = [0.4 * np.eye(1), (0.2 + 0.3j) * np.eye(2)]
    assert matrix_convex_combination_check(Kind.HYPER_STEIN, 2.0, mats, vs)
    mats = [1.5 * np.eye(1), (1.0 + 0.2j) * np.eye(2)]
    assert matrix_convex_combination_check(Kind.HYPER_LYAPUNOV, 3.0, mats, vs)
    assert matrix_convex_combination_check(Kind.LYAPUNOV, None, mats, vs)
    with pytest.raises(ValueError):
        matrix_convex_combination_check(Kind.HYPER_STEIN, 2.0, [2 * np.eye(1), np.eye(2)], vs)


def test_lyapunov_slack_identity_exact(rng):
    # alpha = 0: Q(sum v* A v) = sum v* Q(A) v holds as an identity
    vs = random_isometry_family(rng, 3, [2, 3])
    mats = [complex_gaussian(rng, 2) + 3 * np.eye(2), complex_gaussian(rng, 3) + 3 * np.eye(3)]
    b = isometry_combination(mats, vs)
    q = b + b.conj().T
    pulled = sum(v.conj().T @ (a + a.conj().T) @ v for a, v in zip(mats, vs))
    assert np.linalg.norm(q - pulled) <= 1e-12


def test_four_parameter_form_matrix_convex_smoke():
    # F(A) = alpha A*A + beta A* + gamma A + delta I with Hermitian part checked in the closed Lyapunov set;
    # for (-1, 1, 1, 0), F(A) + F(A)* = I - (A - I)*(A - I), so A = I + K with ||K|| <= 1 qualifies
    alpha, beta, gamma, delta = -1.0, 1.0, 1.0, 0.0

    def f(a):
        n = a.shape[0]
        return alpha * a.conj().T @ a + beta * a.conj().T + gamma * a + delta * np.eye(n)

    rng = make_rng(16)
    for _ in range(50):
        vs = random_isometry_family(rng, 4, [2, 3, 4])
        mats = [np.eye(g) + random_with_norm(rng, g, rng.uniform(0.5, 1.0)) for g in (2, 3, 4)]
        for a in mats:
            assert np.linalg.eigvalsh(f(a) + f(a).conj().T).min() >= -1e-12
        b = isometry_combination(mats, vs)
        assert np.linalg.eigvalsh(f(b) + f(b).conj().T).min() >= -1e-12


def test_cayley_correspondence_hyper():
    rng = make_rng(17)
    for _ in range(100):
        p = random_pd(rng, 3)
        eta = rng.uniform(1.1, 10)
        a = inv_sqrt_pd(p) @ random_with_norm(rng, 3, math.sqrt((eta - 1) / (eta + 1)) * rng.uniform(0.5, 1.5)) @ sqrt_pd(p)
        s_ok, s_cert = is_member(build_qmi(Kind.HYPER_STEIN, p, eta), a)
        if abs(s_cert.min_eig_slack) < 1e-8:
            continue
        assert s_ok == member(Kind.HYPER_LYAPUNOV, p, cayley(a), eta)


def test_nesting():
    rng = make_rng(18)
    for _ in range(100):
        p = random_pd(rng, 3)
        eta1 = rng.uniform(1.1, 5)
        eta = eta1 * rng.uniform(1.01, 3)
        a = sample_lyapunov_member(rng, p, eta1)
        assert member(Kind.HYPER_LYAPUNOV, p, a, eta1)
        assert member(Kind.HYPER_LYAPUNOV, p, a, eta)
        assert member(Kind.LYAPUNOV, p, a)


def test_stein_scalar_rotation():
    rng = make_rng(19)
    for _ in range(50):
        p = random_pd(rng, 3)
        a = sample_stein_member(rng, p, 3.0)
        s = stein_norm_form(p, a)
        phase = np.exp(2j * math.pi * rng.uniform())
        assert stein_norm_form(p, phase * a) == pytest.approx(s, rel=1e-12)
        shrink = rng.uniform() * phase
        assert stein_norm_form(p, shrink * a) == pytest.approx(abs(shrink) * s, rel=1e-10, abs=1e-14)
        assert member(Kind.HYPER_STEIN, p, shrink * a, 3.0, Mode.CLOSED)


def test_limit_recovery():
    rng = make_rng(20)
    checked = 0
    for _ in range(200):
        p = random_pd(rng, 3)
        a = complex_gaussian(rng, 3) + rng.uniform(-1, 3) * np.eye(3)
        classical_ok, cert = is_member(build_qmi(Kind.LYAPUNOV, p), a)
        if abs(cert.min_eig_slack) < 1e-3:
            continue
        checked += 1
        assert member(Kind.HYPER_LYAPUNOV, p, a, 1e12) == classical_ok
        assert member(Kind.HYPER_LYAPUNOV, p, a, Eta.infinity()) == classical_ok
        assert member(Kind.HYPER_STEIN, p, 0.1 * a, Eta.infinity()) == member(Kind.STEIN, p, 0.1 * a)
    assert checked > 100
