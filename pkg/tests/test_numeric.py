import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from g2lab.errors import NotCommuting, NotSymmetric
from g2lab.numeric import (
    Subspace,
    Tolerance,
    cluster,
    orthocomplement,
    orthonormalize,
    simultaneous_diag,
    subspace_image_contained,
    sym_eig,
)

from conftest import random_symmetric


def test_sym_eig_identity():
    w, V = sym_eig(np.eye(3))
    np.testing.assert_array_equal(w, [1, 1, 1])
    assert V.orthonormality_error() < 1e-15


def test_sym_eig_diagonal():
    w, V = sym_eig(np.diag([2.0, -1.0, 0.0]))
    np.testing.assert_allclose(w, [-1, 0, 2])
    np.testing.assert_allclose(np.abs(V.basis), np.eye(3)[:, [1, 2, 0]])


def test_sym_eig_reconstruction_8x8(rng):
    A = random_symmetric(rng, 8)
    w, V = sym_eig(A)
    assert np.linalg.norm(A - V.basis @ np.diag(w) @ V.basis.T) <= 1e-12 * np.linalg.norm(A)
    assert np.all(np.diff(w) >= 0)


def test_sym_eig_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 32).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-1e3, 1e3))))
def test_sym_eig_reconstruction_property(M):
    A = M + M.T
    w, V = sym_eig(A)
    scale = max(np.linalg.norm(A), 1e-300)
    assert np.linalg.norm(A - V.basis @ np.diag(w) @ V.basis.T) <= 1e-10 * scale + 1e-300
    assert V.orthonormality_error() <= 1e-12


def test_sign_convention_first_significant_coordinate_positive(rng):
    _, V = sym_eig(random_symmetric(rng, 6))
    for col in V.basis.T:
        first = col[np.argmax(np.abs(col) > 1e-8 * np.max(np.abs(col)))]
        assert first > 0


def test_deterministic_bitwise(rng):
    A = random_symmetric(rng, 12)
    B = A @ A
    w1, V1 = sym_eig(A)
    w2, V2 = sym_eig(A.copy())
    assert w1.tobytes() == w2.tobytes() and V1.basis.tobytes() == V2.basis.tobytes()
    s1 = simultaneous_diag(A, B)
    s2 = simultaneous_diag(A.copy(), B.copy())
    assert s1[0].basis.tobytes() == s2[0].basis.tobytes()


def test_cluster_transitive():
    groups = cluster(np.array([0.0, 0.5, 1.0, 3.0]), 0.6)
    assert [g.tolist() for g in groups] == [[0, 1, 2], [3]]


def test_simultaneous_diag_identity():
    S, a, b = simultaneous_diag(np.eye(4), np.eye(4))
    np.testing.assert_allclose(a, 1)
    np.testing.assert_allclose(b, 1)
    assert S.orthonormality_error() < 1e-15


def test_simultaneous_diag_shared_standard_basis():
    S, a, b = simultaneous_diag(np.diag([1.0, 1.0, 2.0]), np.diag([3.0, 4.0, 5.0]))
    np.testing.assert_allclose(np.abs(S.basis), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(a, [1, 1, 2])
    np.testing.assert_allclose(b, [3, 4, 5])


def test_simultaneous_diag_construct_then_recover(rng):
    V, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    d1 = np.array([1.0, 1.0, 1.0, -2.0, -2.0, 5.0])
    d2 = np.array([0.3, -1.0, 2.0, 7.0, 0.0, 4.0])
    A = V @ np.diag(d1) @ V.T
    B = V @ np.diag(d2) @ V.T
    S, a, b = simultaneous_diag(A, B)
    got = sorted(zip(np.round(a, 9), np.round(b, 9)))
    want = sorted(zip(np.round(d1, 9), np.round(d2, 9)))
    assert got == want
    for j in range(6):
        v = S.basis[:, j]
        assert np.linalg.norm(A @ v - a[j] * v) <= 1e-10
        assert np.linalg.norm(B @ v - b[j] * v) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_simultaneous_diag_residual_property(n, seed):
    r = np.random.default_rng(seed)
    V, _ = np.linalg.qr(r.standard_normal((n, n)))
    # repeated eigenvalues in A so that B does real work inside clusters
    d1 = r.integers(-2, 3, n).astype(float)
    d2 = r.standard_normal(n)
    A, B = V @ np.diag(d1) @ V.T, V @ np.diag(d2) @ V.T
    A, B = 0.5 * (A + A.T), 0.5 * (B + B.T)
    S, a, b = simultaneous_diag(A, B)
    bound = 1e-9 * (np.linalg.norm(A, 2) + np.linalg.norm(B, 2))
    for j in range(n):
        v = S.basis[:, j]
        assert np.linalg.norm(A @ v - a[j] * v) + np.linalg.norm(B @ v - b[j] * v) <= bound


def test_simultaneous_diag_rejects_noncommuting():
    A = np.diag([1.0, 2.0])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(NotCommuting):
        simultaneous_diag(A, B)


def test_orthocomplement_examples():
    C = orthocomplement(Subspace(np.eye(3)[:, :1]))
    assert C.dim == 2
    np.testing.assert_allclose(C.projector(), np.diag([0.0, 1.0, 1.0]), atol=1e-15)
    assert orthocomplement(Subspace(np.eye(3))).dim == 0
    assert orthocomplement(Subspace.empty(4)).dim == 4


def test_orthocomplement_gram(rng):
    S = Subspace(orthonormalize(rng.standard_normal((7, 2))))
    C = orthocomplement(S)
    assert C.dim == 5
    assert np.max(np.abs(S.basis.T @ C.basis)) <= 1e-12
    G = np.hstack([S.basis, C.basis])
    assert np.max(np.abs(G.T @ G - np.eye(7))) <= 1e-10


def test_orthonormalize_detects_rank():
    v = np.array([1.0, 2.0, 0.0])
    Q = orthonormalize(np.column_stack([v, 2 * v, [0, 0, 1.0]]))
    assert Q.shape == (3, 2)


def test_image_contained_examples():
    e = np.eye(3)
    S = Subspace(e[:, :2])
    assert subspace_image_contained(np.eye(3), S, S) == (True, 0.0)
    rot = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    assert subspace_image_contained(rot, S, S) == (True, 0.0)
    swap = e[:, [2, 1, 0]]
    line = Subspace(e[:, :1])
    ok, leak = subspace_image_contained(swap, line, line)
    assert not ok and leak == pytest.approx(1.0)


def test_empty_subspace_is_legal():
    E = Subspace.empty(5)
    assert E.dim == 0 and E.ambient_dim == 5
    assert subspace_image_contained(np.eye(5), E, E) == (True, 0.0)


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        Tolerance(0.0, 1e-8)
    with pytest.raises(ValueError):
        Tolerance(1e-10, -1.0)
    assert Tolerance().epsilon_window == pytest.approx(1e-8)
