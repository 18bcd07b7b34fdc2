"""Tangent-space model of the complex two-plane Grassmannian at one point.

The model space is the realification of C^2 (x) C^m. Complex basis order is
``e1(x)f1, e2(x)f1, e1(x)f2, e2(x)f2, ...`` and each complex coordinate is
stored as an adjacent (real, imaginary) pair, so real index ``2*(2k+s)+p``
holds part ``p`` of the ``e_{s+1}(x)f_{k+1}`` coordinate.

J is multiplication by i; the quaternionic triple acts on the C^2 factor:
J1 = i*diag(1, -1), J2 = [[0, 1], [-1, 0]], J3 = J1 J2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidM, NotRotation

CONVENTION = "c2-tensor-cm/interleaved-re-im"

_I2 = np.array([[0.0, -1.0], [1.0, 0.0]])  # multiplication by i on (re, im)


def _realify(C: np.ndarray) -> np.ndarray:
    """Real 2n x 2n matrix of a complex n x n matrix in interleaved coordinates."""
    n = C.shape[0]
    R = np.zeros((2 * n, 2 * n))
    R[0::2, 0::2] = C.real
    R[0::2, 1::2] = -C.imag
    R[1::2, 0::2] = C.imag
    R[1::2, 1::2] = C.real
    return R


def _base_structures(m: int) -> tuple[np.ndarray, np.ndarray]:
    eye_m = np.eye(m)
    j = np.kron(eye_m, 1j * np.eye(2))
    q1 = 1j * np.diag([1.0, -1.0])
    q2 = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    # the C^2 factor varies fastest, hence kron(I_m, q)
    J = _realify(j)
    J1 = _realify(np.kron(eye_m, q1))
    J2 = _realify(np.kron(eye_m, q2))
    J3 = J1 @ J2
    return J, np.stack([J1, J2, J3])


def check_rotation(R, tol: float = 1e-12) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise NotRotation(f"expected a 3x3 matrix, got {R.shape}")
    orth = np.max(np.abs(R.T @ R - np.eye(3)))
    det = np.linalg.det(R)
    if orth > tol or abs(det - 1.0) > tol:
        raise NotRotation(f"R^T R - I = {orth:.2e}, det R = {det:.15f}")
    return R


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of SO(3)."""
    Q, Rq = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(Rq))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


@dataclass(frozen=True)
class AmbientSpace:
    m: int
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3), repr=False)
    J: np.ndarray = field(init=False, repr=False)
    J_triple: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 3:
            raise InvalidM(f"m must be an integer >= 3, got {self.m!r}")
        R = np.array(self.rotation, dtype=float)
        J, base = _base_structures(int(self.m))
        triple = base if np.array_equal(R, np.eye(3)) else np.einsum("ab,bij->aij", R, base)
        for arr in (R, J, triple):
            arr.setflags(write=False)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "J_triple", triple)

    @property
    def dim(self) -> int:
        return 4 * self.m

    def Ja(self, a: int) -> np.ndarray:
        """Structure J_a with 1-based cyclic index (J_4 = J_1)."""
        return self.J_triple[(a - 1) % 3]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "convention": CONVENTION,
            "triple_rotation": self.rotation.tolist(),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "AmbientSpace":
        if payload.get("convention", CONVENTION) != CONVENTION:
            raise ValueError(f"unsupported convention {payload['convention']!r}")
        R = payload.get("triple_rotation", np.eye(3).tolist())
        return cls(int(payload["m"]), check_rotation(R, 1e-12))


def build_ambient(m: int) -> AmbientSpace:
    return AmbientSpace(m)


def rotate_triple(amb: AmbientSpace, rot) -> AmbientSpace:
    """New canonical basis J'_a = sum_b R_ab J_b; J is untouched."""
    R = check_rotation(rot)
    return AmbientSpace(amb.m, R @ amb.rotation)


def ambient_invariants(amb: AmbientSpace) -> dict[str, float]:
    """Max-entry residuals of every algebraic axiom of the ambient structures."""
    n = amb.dim
    eye = np.eye(n)
    J = amb.J
    res = {"J^2=-I": np.max(np.abs(J @ J + eye)), "J_orthogonal": np.max(np.abs(J.T @ J - eye))}
    quat = comm = trace = sq = orth = 0.0
    for a in (1, 2, 3):
        Ja, Jb, Jc = amb.Ja(a), amb.Ja(a + 1), amb.Ja(a + 2)
        sq = max(sq, np.max(np.abs(Ja @ Ja + eye)))
        quat = max(quat, np.max(np.abs(Ja @ Jb - Jc)), np.max(np.abs(Jb @ Ja + Jc)))
        comm = max(comm, np.max(np.abs(J @ Ja - Ja @ J)))
        trace = max(trace, abs(np.trace(J @ Ja)))
        orth = max(orth, np.max(np.abs(Ja.T @ Ja - eye)))
    res.update({
        "J_a^2=-I": sq,
        "J_aJ_(a+1)=J_(a+2)=-J_(a+1)J_a": quat,
        "JJ_a=J_aJ": comm,
        "Trace(JJ_a)=0": trace,
        "J_a_orthogonal": orth,
    })
    return {k: float(v) for k, v in res.items()}


def _check_vec(amb: AmbientSpace, *vs):
    for v in vs:
        if np.shape(v) != (amb.dim,):
            raise DimensionMismatch(f"expected vectors of length {amb.dim}, got {np.shape(v)}")


def curvature(amb: AmbientSpace, X, Y, Z) -> np.ndarray:
    """R(X, Y)Z of the ambient space, summed term by term."""
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    _check_vec(amb, X, Y, Z)
    J = amb.J
    out = (Y @ Z) * X - (X @ Z) * Y
    out += (J @ Y @ Z) * (J @ X) - (J @ X @ Z) * (J @ Y) - 2.0 * (J @ X @ Y) * (J @ Z)
    for a in (1, 2, 3):
        Ja = amb.Ja(a)
        JJa = J @ Ja
        out += (Ja @ Y @ Z) * (Ja @ X) - (Ja @ X @ Z) * (Ja @ Y) - 2.0 * (Ja @ X @ Y) * (Ja @ Z)
        out += (JJa @ Y @ Z) * (JJa @ X) - (JJa @ X @ Z) * (JJa @ Y)
    return out
