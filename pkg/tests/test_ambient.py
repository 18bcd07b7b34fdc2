import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2lab.ambient import (
    AmbientSpace,
    ambient_invariants,
    build_ambient,
    curvature,
    random_rotation,
    rotate_triple,
)
from g2lab.errors import DimensionMismatch, InvalidM, NotRotation


def curvature_tensor(amb):
    """R[x, y, z, w] = g(R(e_x, e_y)e_z, e_w), assembled from metric-type products."""
    n = amb.dim
    g = np.eye(n)

    def block(S):
        # g(SY,Z) g(SX,W) - g(SX,Z) g(SY,W), with S^T indices spelled out
        return np.einsum("zy,wx->xyzw", S, S) - np.einsum("zx,wy->xyzw", S, S)

    R = np.einsum("yz,xw->xyzw", g, g) - np.einsum("xz,yw->xyzw", g, g)
    structures = [amb.J] + [amb.Ja(a) for a in (1, 2, 3)]
    for S in structures:
        R += block(S) - 2.0 * np.einsum("yx,wz->xyzw", S, S)
    for a in (1, 2, 3):
        R += block(amb.J @ amb.Ja(a))
    return R


def realified(m, s, k, part=0):
    """Unit vector for part ``part`` of the e_{s+1} (x) f_{k+1} coordinate."""
    v = np.zeros(4 * m)
    v[2 * (2 * k + s) + part] = 1.0
    return v


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8])
def test_axioms_exact(m):
    amb = build_ambient(m)
    assert amb.dim == 4 * m
    assert all(v == 0.0 for v in ambient_invariants(amb).values())
    for M in (amb.J, *amb.J_triple):
        assert set(np.unique(M)) <= {-1.0, 0.0, 1.0}


def test_quaternion_products_exact():
    amb = build_ambient(4)
    J1, J2, J3 = amb.J_triple
    assert np.array_equal(J2 @ J3, J1)
    assert np.array_equal(J3 @ J1, J2)
    assert np.trace(amb.J @ J1) == 0


def test_invalid_m():
    with pytest.raises(InvalidM):
        build_ambient(2)


def test_coordinate_convention():
    amb = build_ambient(3)
    X = realified(3, 0, 0)
    # J is multiplication by i: (re, im) -> (-im, re)
    np.testing.assert_array_equal(amb.J @ X, realified(3, 0, 0, part=1))
    # J_1 = J on the e1 factor, -J on e2
    np.testing.assert_array_equal(amb.Ja(1) @ X, amb.J @ X)
    Y = realified(3, 1, 2)
    np.testing.assert_array_equal(amb.Ja(1) @ Y, -(amb.J @ Y))
    # J_2 (z1, z2) = (z2, -z1)
    np.testing.assert_array_equal(amb.Ja(2) @ X, -realified(3, 1, 0))


def test_rotate_identity_is_noop():
    amb = build_ambient(3)
    rot = rotate_triple(amb, np.eye(3))
    assert np.array_equal(rot.J_triple, amb.J_triple)
    assert np.array_equal(rot.J, amb.J)


def test_rotate_quarter_turn_about_first_axis():
    amb = build_ambient(3)
    R = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
    rot = rotate_triple(amb, R)
    J1, J2, J3 = amb.J_triple
    np.testing.assert_array_equal(rot.Ja(1), J1)
    np.testing.assert_array_equal(rot.Ja(2), J3)
    np.testing.assert_array_equal(rot.Ja(3), -J2)
    assert max(ambient_invariants(rot).values()) == 0.0


def test_rotate_random_preserves_relations(rng):
    amb = build_ambient(3)
    for _ in range(100):
        rot = rotate_triple(amb, random_rotation(rng))
        for a in (1, 2, 3):
            assert np.max(np.abs(rot.Ja(a) @ rot.Ja(a + 1) - rot.Ja(a + 2))) <= 1e-12


def test_rotate_rejects_reflection():
    with pytest.raises(NotRotation):
        rotate_triple(build_ambient(3), np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(NotRotation):
        rotate_triple(build_ambient(3), 2 * np.eye(3))


def test_curvature_diagnostics_match_hand_expansion():
    amb = build_ambient(3)
    X = realified(3, 0, 0)
    JX = amb.J @ X
    assert curvature(amb, X, JX, JX) @ X == pytest.approx(8.0, abs=1e-14)
    Y = realified(3, 0, 1)
    assert curvature(amb, X, Y, Y) @ X == pytest.approx(2.0, abs=1e-14)


def test_curvature_matches_tensor_oracle(rng):
    amb = build_ambient(3)
    R = curvature_tensor(amb)
    for _ in range(20):
        X, Y, Z, W = rng.standard_normal((4, amb.dim))
        direct = curvature(amb, X, Y, Z) @ W
        oracle = np.einsum("xyzw,x,y,z,w->", R, X, Y, Z, W)
        assert direct == pytest.approx(oracle, abs=1e-11)


def test_curvature_equal_arguments_vanish(rng):
    amb = build_ambient(3)
    X, Z = rng.standard_normal((2, amb.dim))
    assert np.linalg.norm(curvature(amb, X, X, Z)) <= 1e-13


def test_curvature_dimension_mismatch():
    amb = build_ambient(3)
    with pytest.raises(DimensionMismatch):
        curvature(amb, np.zeros(12), np.zeros(12), np.zeros(11))


@pytest.mark.parametrize("m", [3, 4, 5])
def test_curvature_symmetries(m, rng):
    amb = build_ambient(m)
    for _ in range(25):
        X, Y, Z, W = rng.standard_normal((4, amb.dim)) / np.sqrt(amb.dim)
        R = curvature(amb, X, Y, Z)
        assert np.linalg.norm(R + curvature(amb, Y, X, Z)) <= 1e-12
        assert abs(R @ W + curvature(amb, X, Y, W) @ Z) <= 1e-12
        assert np.linalg.norm(R + curvature(amb, Y, Z, X) + curvature(amb, Z, X, Y)) <= 1e-12
        assert abs(R @ W - curvature(amb, Z, W, X) @ Y) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_curvature_rotation_invariant(seed):
    r = np.random.default_rng(seed)
    amb = build_ambient(3)
    rot = rotate_triple(amb, random_rotation(r))
    X, Y, Z = r.standard_normal((3, amb.dim))
    assert np.linalg.norm(curvature(amb, X, Y, Z) - curvature(rot, X, Y, Z)) <= 1e-10


def test_json_round_trip(rng):
    amb = rotate_triple(build_ambient(4), random_rotation(rng))
    payload = amb.to_json()
    assert payload["convention"] == "c2-tensor-cm/interleaved-re-im"
    back = AmbientSpace.from_json(payload)
    assert np.array_equal(back.J_triple, amb.J_triple)
