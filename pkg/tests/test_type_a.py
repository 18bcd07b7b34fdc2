import math

import mpmath
import numpy as np
import pytest

from g2lab.errors import HypothesisViolated, RadiusOutOfRange
from g2lab.hypersurface import theta_eigenspaces
from g2lab.numeric import Subspace, subspace_image_contained
from g2lab.type_a import (
    R_MAX,
    R_THREE,
    build_type_a,
    qform_residual,
    d_identity_operator,
    d_identity_residuals,
    fit_qforms,
    commutator_residuals,
    spectrum_type_a,
    verify_d_identity,
    verify_commutator,
)

from conftest import radii


def mp_spectrum(r):
    mpmath.mp.dps = 50
    r = mpmath.mpf(r)
    s2, s8 = mpmath.sqrt(2), mpmath.sqrt(8)
    return s8 * mpmath.cot(s8 * r), s2 * mpmath.cot(s2 * r), -s2 * mpmath.tan(s2 * r)


def test_three_distinct_at_special_radius():
    s = spectrum_type_a(R_THREE)
    assert abs(s.alpha) <= 1e-12 and s.mu == 0.0
    assert s.beta == pytest.approx(math.sqrt(2), abs=1e-12)
    assert s.lambda_ == pytest.approx(-math.sqrt(2), abs=1e-12)
    assert s.three_distinct


def test_four_distinct_elsewhere():
    assert spectrum_type_a(0.3).distinct_count == 4


def test_spectrum_matches_high_precision(rng):
    for r in rng.uniform(0.01, R_MAX - 0.01, 20):
        s = spectrum_type_a(r)
        for got, want in zip((s.alpha, s.beta, s.lambda_), mp_spectrum(r)):
            assert got == pytest.approx(float(want), rel=1e-12, abs=1e-12)


def test_double_angle_identities(rng):
    for r in rng.uniform(0.05, R_MAX - 0.05, 100):
        s = spectrum_type_a(r)
        scale = max(1.0, abs(s.beta), abs(s.lambda_))
        assert abs(s.alpha - (s.beta + s.lambda_)) <= 1e-12 * scale
        assert abs(s.beta * s.lambda_ + 2.0) <= 1e-12 * scale


def test_spectrum_endpoints():
    assert spectrum_type_a(0.01).alpha > 0
    assert spectrum_type_a(R_MAX - 0.01).alpha < 0
    assert spectrum_type_a(1e-4).alpha > spectrum_type_a(0.01).alpha


@pytest.mark.parametrize("r", [0.0, -0.1, R_MAX, 2.0])
def test_radius_out_of_range(r):
    with pytest.raises(RadiusOutOfRange):
        spectrum_type_a(r)


def test_dims_m3(model_3):
    assert model_3.dims == (1, 2, 4, 4)


@pytest.mark.parametrize("m", range(3, 9))
def test_dims_and_orthogonality(m):
    model = build_type_a(m, 0.7)
    assert model.dims == (1, 2, 2 * m - 2, 2 * m - 2)
    spaces = [model.T_alpha, model.T_beta, model.T_lambda, model.T_mu]
    for i, S in enumerate(spaces):
        assert subspace_image_contained(model.A, S, S)[0]
        for T in spaces[i + 1:]:
            assert np.max(np.abs(S.basis.T @ T.basis), initial=0.0) <= 1e-12


def test_principal_xi_a(model_3):
    hp, A, s = model_3.hp, model_3.A, model_3.spectrum
    assert np.linalg.norm(A @ hp.xi - s.alpha * hp.xi) <= 1e-12
    for a in (2, 3):
        assert np.linalg.norm(A @ hp.xi_(a) - s.beta * hp.xi_(a)) <= 1e-12
    np.testing.assert_allclose(model_3.betas, [s.alpha, s.beta, s.beta], atol=1e-12)


def test_lambda_mu_in_theta1_eigenspaces(model_3):
    Hp, Hm = theta_eigenspaces(model_3.hp, 1)
    I = np.eye(model_3.hp.dim)
    assert subspace_image_contained(I, model_3.T_lambda, Hm)[0]
    assert subspace_image_contained(I, model_3.T_mu, Hp)[0]


def test_d_identity_coefficient_hand_expansion(model_3):
    hp, s = model_3.hp, model_3.spectrum
    X = model_3.T_lambda.basis[:, 0]
    # on T_lambda, phi X = phi_1 X, so the operator is (4 + 2 alpha lambda - 2 lambda^2) phi_1 X
    coef = 4 + 2 * s.alpha * s.lambda_ - 2 * s.lambda_ ** 2
    assert abs(coef) <= 1e-12
    v = d_identity_operator(hp, model_3.A, s.alpha, 1) @ X
    assert np.linalg.norm(v - coef * (hp.phi_(1) @ X)) <= 1e-12
    assert abs(2 + s.beta * s.lambda_) <= 1e-12


@pytest.mark.parametrize("m", [3, 4, 5])
def test_d_identity_vanishes_on_grid(m):
    for r in radii():
        model = build_type_a(m, r)
        assert np.max(verify_d_identity(model.hp, model.A, model.betas)) <= 1e-10


def test_d_identity_negative_control(model_3):
    res = d_identity_residuals(model_3.hp, 2 * model_3.A, 2 * model_3.betas)
    assert np.all(res > 0.1)


def test_d_identity_requires_hypotheses(model_3, rng):
    E = rng.standard_normal(model_3.A.shape)
    with pytest.raises(HypothesisViolated):
        verify_d_identity(model_3.hp, model_3.A + 1e-3 * (E + E.T), model_3.betas)


def test_commutator(model_3):
    assert np.max(verify_commutator(model_3.hp, model_3.A)) <= 1e-10
    assert np.max(commutator_residuals(model_3.hp, np.eye(model_3.hp.dim))) == 0.0


def test_commutator_exploratory_random_block(model_3, rng):
    hp = model_3.hp
    S = rng.standard_normal((hp.D.dim, hp.D.dim))
    A = hp.D.basis @ (S + S.T) @ hp.D.basis.T
    res = verify_commutator(hp, A)
    assert np.all(np.isfinite(res))


def test_fit_qforms_exact_on_type_a(model_3):
    q, res = fit_qforms(model_3.hp, model_3.A, model_3.betas)
    assert res <= 1e-8
    zero = np.zeros_like(q)
    assert max(qform_residual(model_3.hp, model_3.A, model_3.betas, zero, a) for a in (1, 2, 3)) > 1.0


def test_fit_qforms_equal_betas_unconstrained(model_3, rng):
    hp = model_3.hp
    A = np.eye(hp.dim)
    betas = np.ones(3)
    q, res = fit_qforms(hp, A, betas)
    assert np.array_equal(q, np.zeros_like(q))
    other = rng.standard_normal(q.shape)
    for a in (1, 2, 3):
        assert qform_residual(hp, A, betas, other, a) == qform_residual(hp, A, betas, q, a)
    assert res == max(qform_residual(hp, A, betas, q, a) for a in (1, 2, 3))


def test_fit_qforms_jitter_negative_control(model_3, rng):
    hp = model_3.hp
    S = rng.standard_normal((hp.D.dim, hp.D.dim))
    E = hp.D.basis @ (S + S.T) @ hp.D.basis.T
    E *= 1e-3 / np.linalg.norm(E, 2)
    _, res = fit_qforms(hp, model_3.A + E, model_3.betas)
    assert 1e-5 < res < 1e-1


def test_fit_requires_principal_xi_a(model_3):
    with pytest.raises(HypothesisViolated):
        fit_qforms(model_3.hp, model_3.A, np.zeros(3))
